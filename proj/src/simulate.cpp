#include "qpt/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qpt/rng.hpp"

namespace qpt {

namespace {

// Walker/Vose alias table over the 16 cells; O(1) per draw.
struct AliasTable {
    std::array<double, 16> threshold;
    std::array<int, 16> alias;

    explicit AliasTable(const std::array<double, 16>& p) {
        std::array<double, 16> scaled;
        std::array<int, 16> small{}, large{};
        int ns = 0, nl = 0;
        for (int i = 0; i < 16; ++i) {
            scaled[i] = p[i] * 16.0;
            (scaled[i] < 1.0 ? small[ns++] : large[nl++]) = i;
        }
        for (int i = 0; i < 16; ++i) {
            threshold[i] = 1.0;
            alias[i] = i;
        }
        while (ns > 0 && nl > 0) {
            const int s = small[--ns];
            const int l = large[--nl];
            threshold[s] = scaled[s];
            alias[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            (scaled[l] < 1.0 ? small[ns++] : large[nl++]) = l;
        }
        // Leftovers are 1 up to rounding; they keep threshold = 1.
    }

    int draw(RngStream& rng) const {
        const int i = std::min(15, static_cast<int>(rng.uniform() * 16.0));
        return rng.uniform() < threshold[i] ? i : alias[i];
    }
};

}  // namespace

ClickRecord simulate_clicks(const Pom& pom, const DensityMatrix& rho, long long n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_clicks: n must be positive");

    std::array<double, 16> p = probabilities(pom, rho);
    double sum = 0.0;
    for (int j = 0; j < 16; ++j) {
        if (p[j] < -1e-9) throw std::invalid_argument("simulate_clicks: negative outcome probability");
        if (p[j] < 0.0) p[j] = 0.0;  // eigen-floor dust of valid states
        sum += p[j];
    }
    for (double& v : p) v /= sum;

    ClickRecord rec;
    rec.total = n;
    rec.pom_kind = pom.kind;
    rec.seed = seed;
    RngStream rng(seed);

    if (n > 1000) {
        const AliasTable table(p);
        for (long long k = 0; k < n; ++k) ++rec.counts[table.draw(rng)];
    } else {
        std::array<double, 16> cum;
        double acc = 0.0;
        for (int j = 0; j < 16; ++j) {
            acc += p[j];
            cum[j] = acc;
        }
        for (long long k = 0; k < n; ++k) {
            const double u = rng.uniform();
            int j = 0;
            while (j < 15 && u >= cum[j]) ++j;
            ++rec.counts[j];
        }
    }
    return rec;
}

FrequencyVector frequencies(const ClickRecord& rec) {
    if (rec.total < 1) throw std::invalid_argument("frequencies: record has no clicks");
    FrequencyVector f;
    for (int j = 0; j < 16; ++j) f[j] = static_cast<double>(rec.counts[j]) / static_cast<double>(rec.total);
    return f;
}

std::string click_record_csv_row(const ClickRecord& rec) {
    char buf[512];
    int len = std::snprintf(buf, sizeof(buf), "%s,%llu,%lld", pom_kind_label(rec.pom_kind),
                            static_cast<unsigned long long>(rec.seed), rec.total);
    for (int j = 0; j < 16; ++j)
        len += std::snprintf(buf + len, sizeof(buf) - static_cast<std::size_t>(len), ",%lld", rec.counts[j]);
    return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace qpt
