# Copyright 2026 The statematch developers
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

"""Quantum-state-matching protocol toolkit.

The compiled core exposes the protocol unitary, its two-CNOT decomposition,
the statevector/density simulators with post-selection, and the statistical
benchmark operations.
"""

from statematch._core import *  # noqa: F401,F403
from statematch._core import __version__  # noqa: F401
