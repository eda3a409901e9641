# Copyright 2026 The PSR Engine Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Streaming procedure step recognition: metrics, filtering, sampling, losses."""

from ._psr import (
    AlignmentError,
    ArgumentError,
    EventSequence,
    ParseError,
    Procedure,
    PsrError,
    StepEvent,
    StreamError,
    StructuralError,
    UndefinedMetricError,
    UnknownTransitionError,
    clip_indices,
    clip_label,
    damerau_levenshtein,
    evaluate,
    f1_score,
    fuse,
    heavy_occlusion_config,
    kcas_pmf,
    load_procedure,
    meccano_procedure,
    multilabel_bce,
    pos_score,
    run_experiment,
    run_filter,
    sample_clip_ends,
    simulate,
    supcon_loss,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
