// Copyright 2026 The loopdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "loopdyn/spin_state.h"

#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace loopdyn {

namespace {

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
    for (int k = 0; k < 4; k++) {
        out.push_back(static_cast<uint8_t>(v >> (8 * k)));
    }
}

uint32_t get_u32(const uint8_t *in) {
    uint32_t v = 0;
    for (int k = 0; k < 4; k++) {
        v |= static_cast<uint32_t>(in[k]) << (8 * k);
    }
    return v;
}

}  // namespace

SpinState::SpinState(std::shared_ptr<const LatticeGeometry> geom)
    : geom_(std::move(geom)),
      link_plaquettes_(geom_->link_plaquette_table()),
      per_link_(geom_->plaquettes_per_link()),
      spins_((geom_->num_links() + 63) / 64, 0),
      defects_(geom_->num_plaquettes(), 0) {}

int SpinState::local_sum(LinkId l) const {
    int s = 0;
    for (PlaquetteId p : geom_->plaquettes_of_link(l)) {
        s += b_value(p);
    }
    return s;
}

void SpinState::apply_vertex(VertexId v) {
    for (LinkId l : geom_->links_of_vertex(v)) {
        flip_link(l);
    }
}

SpinState::Scratch SpinState::recompute_from_scratch() const {
    Scratch out{std::vector<int8_t>(geom_->num_plaquettes(), 1), 0};
    for (PlaquetteId p = 0; p < geom_->num_plaquettes(); p++) {
        int prod = 1;
        for (LinkId l : geom_->links_of_plaquette(p)) {
            prod *= sigma_z(l);
        }
        out.b_field[p] = static_cast<int8_t>(prod);
        out.defect_count += prod < 0;
    }
    return out;
}

bool SpinState::consistent() const {
    Scratch s = recompute_from_scratch();
    if (s.defect_count != defect_count_) {
        return false;
    }
    for (PlaquetteId p = 0; p < geom_->num_plaquettes(); p++) {
        if (s.b_field[p] != b_value(p)) {
            return false;
        }
    }
    return true;
}

void SpinState::assign_spins(std::vector<uint64_t> words) {
    if (words.size() != spins_.size()) {
        throw std::invalid_argument("spin word count does not match lattice");
    }
    uint32_t tail = geom_->num_links() % 64;
    if (tail != 0) {
        words.back() &= (uint64_t{1} << tail) - 1;
    }
    spins_ = std::move(words);
    Scratch s = recompute_from_scratch();
    for (PlaquetteId p = 0; p < geom_->num_plaquettes(); p++) {
        defects_[p] = s.b_field[p] < 0;
    }
    defect_count_ = s.defect_count;
}

bool SpinState::operator==(const SpinState &other) const {
    return geom_->dim() == other.geom_->dim() && geom_->L() == other.geom_->L() && spins_ == other.spins_;
}

std::vector<uint8_t> SpinState::to_bytes() const {
    std::vector<uint8_t> out;
    uint32_t n = geom_->num_links();
    out.reserve(8 + (n + 7) / 8);
    put_u32(out, static_cast<uint32_t>(geom_->dim()));
    put_u32(out, static_cast<uint32_t>(geom_->L()));
    for (uint32_t b = 0; b < (n + 7) / 8; b++) {
        out.push_back(static_cast<uint8_t>(spins_[b / 8] >> (8 * (b % 8))));
    }
    return out;
}

SpinState SpinState::from_bytes(const std::vector<uint8_t> &bytes) {
    if (bytes.size() < 8) {
        throw std::invalid_argument("spin checkpoint truncated: missing header");
    }
    int dim = static_cast<int>(get_u32(bytes.data()));
    int L = static_cast<int>(get_u32(bytes.data() + 4));
    auto geom = build_geometry(dim, L);
    uint32_t n = geom->num_links();
    if (bytes.size() != 8 + static_cast<size_t>((n + 7) / 8)) {
        throw std::invalid_argument("spin checkpoint size does not match its header");
    }
    std::vector<uint64_t> words((n + 63) / 64, 0);
    for (uint32_t b = 0; b < (n + 7) / 8; b++) {
        words[b / 8] |= static_cast<uint64_t>(bytes[8 + b]) << (8 * (b % 8));
    }
    if (n % 8 != 0 && (bytes.back() >> (n % 8)) != 0) {
        throw std::invalid_argument("spin checkpoint has nonzero padding bits");
    }
    SpinState state(std::move(geom));
    state.assign_spins(std::move(words));
    return state;
}

void SpinState::serialize(std::ostream &out) const {
    auto bytes = to_bytes();
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

SpinState SpinState::deserialize(std::istream &in) {
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_bytes(bytes);
}

}  // namespace loopdyn
