#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "qpt/pom.hpp"
#include "qpt/states.hpp"

namespace qpt {

/// Counts of a simulated N-click experiment, one cell per POM outcome.
struct ClickRecord {
    long long total = 0;
    std::array<long long, 16> counts{};
    PomKind pom_kind = PomKind::product;
    std::uint64_t seed = 0;
};

using FrequencyVector = std::array<double, 16>;

/// Draws n multinomial clicks from the outcome probabilities of (pom, rho).
/// Deterministic given the seed. Probabilities below -1e-9 are rejected;
/// tiny negative dust is clamped to zero and the vector renormalized.
ClickRecord simulate_clicks(const Pom& pom, const DensityMatrix& rho, long long n, std::uint64_t seed);

FrequencyVector frequencies(const ClickRecord& rec);

inline constexpr const char* click_record_csv_header =
    "pom_kind,seed,N,c00,c01,c02,c03,c10,c11,c12,c13,c20,c21,c22,c23,c30,c31,c32,c33";

std::string click_record_csv_row(const ClickRecord& rec);

}  // namespace qpt
