# Copyright 2026 The Offspan Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Zero-shot offensive span extraction from sentence-level classifiers."""

from offspan._core import (
    Attribution,
    CharRange,
    Checkpoint,
    Comment,
    Error,
    TokenSpan,
    augment,
    build_lexicon,
    char_f1,
    decode_spans,
    default_run_config,
    evaluate,
    explain,
    load_dataset,
    run_experiment,
    save_dataset,
    tokenize,
    train,
)

__all__ = [
    "Attribution",
    "CharRange",
    "Checkpoint",
    "Comment",
    "Error",
    "TokenSpan",
    "augment",
    "build_lexicon",
    "char_f1",
    "decode_spans",
    "default_run_config",
    "evaluate",
    "explain",
    "load_dataset",
    "run_experiment",
    "save_dataset",
    "tokenize",
    "train",
]
