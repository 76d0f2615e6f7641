#pragma once

#include "fusionhar/core.hpp"
#include "fusionhar/error.hpp"
#include "fusionhar/fusion.hpp"
#include "fusionhar/ingest.hpp"
#include "fusionhar/metrics.hpp"
#include "fusionhar/models.hpp"
#include "fusionhar/pipeline.hpp"
