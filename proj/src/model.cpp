// Copyright 2026 The dptsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpt/model.hpp"

#include <cstring>

namespace dpt {

namespace {

// FNV-1a over the raw bytes of each field, in declaration order.
void hash_double(std::uint64_t& h, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
}

}  // namespace

std::uint64_t ModelParams::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    hash_double(h, delta);
    hash_double(h, kerr);
    hash_double(h, drive);
    hash_double(h, kappa);
    hash_double(h, kappa_phi);
    hash_double(h, kappa_two);
    hash_double(h, n_th);
    hash_double(h, scale);
    return h;
}

ModelParams rescale(const ModelParams& reduced) {
    ModelParams p = reduced;
    p.delta = reduced.delta * reduced.scale;
    p.drive = reduced.drive * reduced.scale;
    return p;
}

ModelParams reference_params() {
    ModelParams p;
    p.delta = 0.0;
    p.kerr = kTwoPi * 7.0e3;
    p.drive = kTwoPi * 65.5e3;
    p.kappa = kTwoPi * 77.0e3;
    p.kappa_phi = kTwoPi * 4.4e3;
    p.kappa_two = kTwoPi * 78.0;
    p.n_th = 0.055;
    p.scale = 1.0;
    return p;
}

ModelParams desk_params() {
    ModelParams p;
    p.delta = 0.0;
    p.kerr = 1.0;
    p.drive = 2.0;
    p.kappa = 1.0;
    p.kappa_phi = 0.0;
    p.kappa_two = 0.1;
    p.n_th = 0.0;
    p.scale = 1.0;
    return p;
}

}  // namespace dpt
