#pragma once

// Generated by tools/embed_schemas.py from schemas/; do not edit.

namespace fusionhar::schemas {

inline constexpr const char* kCompareReport = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "fusionhar comparison report",
  "type": "object",
  "required": ["format", "version", "dataset", "protocol", "columns", "rows", "decision_fusion", "kalman_fusion"],
  "additionalProperties": false,
  "definitions": {
    "unit": {"type": "number", "minimum": 0, "maximum": 1},
    "count": {"type": "integer", "minimum": 0},
    "cell": {
      "type": "object",
      "required": ["accuracy", "rmse", "precision_weighted", "recall_weighted", "f1_weighted", "confusion_csv", "breakdown", "totals"],
      "properties": {
        "accuracy": {"$ref": "#/definitions/unit"},
        "rmse": {"$ref": "#/definitions/unit"},
        "precision_weighted": {"$ref": "#/definitions/unit"},
        "recall_weighted": {"$ref": "#/definitions/unit"},
        "f1_weighted": {"$ref": "#/definitions/unit"},
        "confusion_csv": {"type": "string"},
        "breakdown": {
          "type": "array",
          "minItems": 1,
          "items": {
            "type": "object",
            "required": ["class", "name", "tp", "fp", "fn", "tn"],
            "additionalProperties": false,
            "properties": {
              "class": {"$ref": "#/definitions/count"},
              "name": {"type": "string"},
              "tp": {"$ref": "#/definitions/count"},
              "fp": {"$ref": "#/definitions/count"},
              "fn": {"$ref": "#/definitions/count"},
              "tn": {"$ref": "#/definitions/count"}
            }
          }
        },
        "totals": {
          "type": "object",
          "required": ["tp", "fp", "fn", "tn"],
          "additionalProperties": false,
          "properties": {
            "tp": {"$ref": "#/definitions/count"},
            "fp": {"$ref": "#/definitions/count"},
            "fn": {"$ref": "#/definitions/count"},
            "tn": {"$ref": "#/definitions/count"}
          }
        },
        "base": {"enum": ["svm", "gboost", "rf"]},
        "model": {"enum": ["svm", "gboost", "rf"]}
      },
      "additionalProperties": false
    }
  },
  "properties": {
    "format": {"const": "fusionhar-compare-report"},
    "version": {"const": 1},
    "dataset": {
      "type": "object",
      "required": ["kind", "source", "rows", "dropped_rows", "classes", "train_rows", "test_rows"],
      "additionalProperties": false,
      "properties": {
        "kind": {"enum": ["primary", "secondary", "synthetic"]},
        "source": {"type": "string"},
        "rows": {"$ref": "#/definitions/count"},
        "dropped_rows": {"$ref": "#/definitions/count"},
        "classes": {"type": "array", "minItems": 2, "items": {"type": "string"}},
        "train_rows": {"$ref": "#/definitions/count"},
        "test_rows": {"$ref": "#/definitions/count"}
      }
    },
    "protocol": {
      "type": "object",
      "required": ["ratio", "seed", "n_trees", "n_stages", "learning_rate", "kalman_q", "kalman_r"],
      "additionalProperties": false,
      "properties": {
        "ratio": {"type": "number", "minimum": 0, "maximum": 1},
        "seed": {"$ref": "#/definitions/count"},
        "n_trees": {"type": "integer", "minimum": 1},
        "n_stages": {"type": "integer", "minimum": 1},
        "learning_rate": {"type": "number", "minimum": 0},
        "kalman_q": {"type": "number", "minimum": 0},
        "kalman_r": {"type": "number", "minimum": 0}
      }
    },
    "columns": {
      "type": "array",
      "minItems": 4,
      "maxItems": 4,
      "items": {"enum": ["accelerometer", "gyroscope", "magnetometer", "feature_fusion"]}
    },
    "rows": {
      "type": "array",
      "minItems": 3,
      "maxItems": 3,
      "items": {
        "type": "object",
        "required": ["model", "title", "cells"],
        "additionalProperties": false,
        "properties": {
          "model": {"enum": ["svm", "gboost", "rf"]},
          "title": {"enum": ["SVM", "Gradient Boost", "Random Forest"]},
          "cells": {
            "type": "object",
            "required": ["accelerometer", "gyroscope", "magnetometer", "feature_fusion"],
            "additionalProperties": false,
            "properties": {
              "accelerometer": {"$ref": "#/definitions/cell"},
              "gyroscope": {"$ref": "#/definitions/cell"},
              "magnetometer": {"$ref": "#/definitions/cell"},
              "feature_fusion": {"$ref": "#/definitions/cell"}
            }
          }
        }
      }
    },
    "decision_fusion": {"$ref": "#/definitions/cell"},
    "kalman_fusion": {"$ref": "#/definitions/cell"}
  }
}
)schema";

inline constexpr const char* kMetricsReport = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "fusionhar metrics report",
  "type": "object",
  "required": ["format", "version", "model", "subset", "metrics"],
  "additionalProperties": false,
  "definitions": {
    "unit": {"type": "number", "minimum": 0, "maximum": 1},
    "count": {"type": "integer", "minimum": 0}
  },
  "properties": {
    "format": {"const": "fusionhar-metrics-report"},
    "version": {"const": 1},
    "subset": {"enum": ["train", "test", "all"]},
    "model": {
      "type": "object",
      "required": ["family", "fusion", "sensors"],
      "additionalProperties": false,
      "properties": {
        "family": {"enum": ["svm", "gboost", "rf"]},
        "fusion": {"enum": ["none", "feature", "decision", "kalman"]},
        "sensors": {"type": "array", "minItems": 1, "items": {"enum": ["accelerometer", "gyroscope", "magnetometer"]}}
      }
    },
    "metrics": {
      "type": "object",
      "required": ["n", "accuracy", "precision_weighted", "recall_weighted", "f1_weighted", "precision_macro",
                   "recall_macro", "f1_macro", "rmse", "per_class", "confusion_matrix"],
      "additionalProperties": false,
      "properties": {
        "n": {"type": "integer", "minimum": 1},
        "accuracy": {"$ref": "#/definitions/unit"},
        "precision_weighted": {"$ref": "#/definitions/unit"},
        "recall_weighted": {"$ref": "#/definitions/unit"},
        "f1_weighted": {"$ref": "#/definitions/unit"},
        "precision_macro": {"$ref": "#/definitions/unit"},
        "recall_macro": {"$ref": "#/definitions/unit"},
        "f1_macro": {"$ref": "#/definitions/unit"},
        "rmse": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "per_class": {
          "type": "array",
          "minItems": 1,
          "items": {
            "type": "object",
            "required": ["class", "precision", "recall", "f1", "support", "tp", "fp", "fn", "tn"],
            "additionalProperties": false,
            "properties": {
              "class": {"$ref": "#/definitions/count"},
              "name": {"type": "string"},
              "precision": {"$ref": "#/definitions/unit"},
              "recall": {"$ref": "#/definitions/unit"},
              "f1": {"$ref": "#/definitions/unit"},
              "support": {"$ref": "#/definitions/count"},
              "tp": {"$ref": "#/definitions/count"},
              "fp": {"$ref": "#/definitions/count"},
              "fn": {"$ref": "#/definitions/count"},
              "tn": {"$ref": "#/definitions/count"}
            }
          }
        },
        "confusion_matrix": {
          "type": "array",
          "minItems": 1,
          "items": {"type": "array", "items": {"$ref": "#/definitions/count"}}
        }
      }
    }
  }
}
)schema";

}  // namespace fusionhar::schemas
