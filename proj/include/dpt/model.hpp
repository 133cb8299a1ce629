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

#pragma once

#include <cstdint>

#include "dpt/types.hpp"

namespace dpt {

// Physical parameters of the two-photon driven Kerr resonator.
//
// All rates and frequencies are stored as angular frequencies (rad/s).
// Config files take ordinary frequencies f = omega / 2pi in Hz and convert
// at the boundary; nothing below this layer ever divides by 2pi.
struct ModelParams {
    double delta = 0.0;      // pump-to-cavity detuning
    double kerr = 0.0;       // Kerr nonlinearity U
    double drive = 0.0;      // two-photon drive amplitude G
    double kappa = 0.0;      // one-photon loss rate
    double kappa_phi = 0.0;  // dephasing rate
    double kappa_two = 0.0;  // two-photon loss rate
    double n_th = 0.0;       // mean thermal photon number
    double scale = 1.0;      // thermodynamic-limit rescaling parameter L

    bool valid() const {
        return kappa >= 0.0 && kappa_phi >= 0.0 && kappa_two >= 0.0 &&
               n_th >= 0.0 && scale > 0.0;
    }

    // Stable content hash used for provenance manifests and record headers.
    std::uint64_t hash() const;
};

// Applies the thermodynamic-limit rescaling: the stored delta and drive are
// interpreted as the reduced values (delta~, G~) and multiplied by scale;
// kappa, kappa_phi, kappa_two, kerr and n_th are left untouched.
ModelParams rescale(const ModelParams& reduced);

// Reference device operating point (rates as angular frequencies):
// U/2pi = 7 kHz, kappa/2pi = 77 kHz, kappa_phi/2pi = 4.4 kHz,
// kappa_two/2pi = 78 Hz, n_th = 0.055, and the reduced drive
// G~/2pi = 65.5 kHz at scale L = 1 with delta~ = 0.
ModelParams reference_params();

// A dimensionless desk-scale operating point (kappa = 1) used by the fast
// default studies: delta = 0, U = kappa, G = 2 kappa, kappa_two = 0.1 kappa,
// kappa_phi = 0, n_th = 0.
ModelParams desk_params();

}  // namespace dpt
