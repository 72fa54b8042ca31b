# Copyright 2026 The Anchored Inversion Authors
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

"""Writes data/transect_profile.txt, the bundled 80-node stand-in truth.

A smooth ridge-and-valley profile plus seeded roughness, rescaled so the
minimum is 17 and the maximum is 1024.9.
"""
import numpy as np

rng = np.random.default_rng(20260101)
x = np.arange(1, 81, dtype=float)
base = 420 * np.exp(-((x - 30) / 11) ** 2) + 650 * np.exp(-((x - 62) / 8) ** 2) + 2.5 * x
noise = np.convolve(rng.normal(0, 40, 84), np.ones(5) / 5, mode="valid")
y = base + noise
y = 17 + (y - y.min()) * (1024.9 - 17) / (y.max() - y.min())
with open("data/transect_profile.txt", "w") as f:
    f.write("# synthetic elevation-like transect, 80 nodes at x = 1..80\n")
    for v in y:
        f.write(f"{v:.6f}\n")
