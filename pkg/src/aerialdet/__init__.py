"""Spatio-temporal post-processing for vehicle detection in wide-area aerial video.

The pipeline turns a normalized grayscale saliency frame into vehicle
detections in four stages: multi-neighborhood hysteresis thresholding,
morphological shaping (opening + closing), 8-connected component
extraction, and a temporal filter that drops detections which stay static
across adjacent registered frames.  An evaluation suite scores detections
against rectangular ground truth (TP / Split / Merge / FN / FP, PWC and
F-measures), and a synthetic scene generator provides registered test
sequences with exact ground truth.
"""

__version__ = "0.1.0"
