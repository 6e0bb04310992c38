# Copyright 2026 The Lomia Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import sys

# ctest points LOMIA_PYTHONPATH at the freshly built extension; an editable
# install's import hook would otherwise load its own (possibly stale) copy.
_staged = os.environ.get("LOMIA_PYTHONPATH")
if _staged:
    sys.meta_path[:] = [
        f for f in sys.meta_path if not type(f).__module__.startswith("_editable_skbc_lomia")
    ]
    sys.path.insert(0, _staged)
    for name in [m for m in sys.modules if m == "lomia" or m.startswith("lomia.")]:
        del sys.modules[name]
