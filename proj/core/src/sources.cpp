#include "mixcomp/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mixcomp {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_distribution(std::span<const double> p, std::uint32_t a, const char* what) {
    if (p.size() != a)
        throw std::invalid_argument(std::string(what) + ": length != alphabet size");
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0))
            throw std::invalid_argument(std::string(what) + ": negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw std::invalid_argument(std::string(what) + ": row sums to " + std::to_string(sum));
}

std::vector<double> dirichlet_half(std::uint32_t a, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(0.5, 1.0);
    std::vector<double> v(a);
    double sum = 0.0;
    for (auto& x : v) {
        x = gamma(rng);
        sum += x;
    }
    // a Gamma(1/2) draw of exactly 0 has probability ~0 but guard anyway
    if (sum <= 0.0) {
        std::fill(v.begin(), v.end(), 1.0 / a);
        return v;
    }
    for (auto& x : v) x /= sum;
    return v;
}

std::uint8_t sample_categorical(std::span<const double> cum, double u) {
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cum.begin());
    if (idx >= cum.size()) idx = cum.size() - 1;
    return static_cast<std::uint8_t>(idx);
}

std::vector<double> cumulative(std::span<const double> p) {
    std::vector<double> cum(p.size());
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += p[i];
        cum[i] = s;
    }
    cum.back() = std::max(cum.back(), 1.0);
    return cum;
}

// Closed communicating classes of the support graph. A unique stationary
// distribution exists iff there is exactly one.
int count_closed_classes(const std::vector<std::vector<double>>& rows) {
    const std::size_t a = rows.size();
    // reach[i] = set of states reachable from i (including i)
    std::vector<std::vector<bool>> reach(a, std::vector<bool>(a, false));
    for (std::size_t i = 0; i < a; ++i) reach[i][i] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < a; ++i)
            for (std::size_t j = 0; j < a; ++j)
                if (rows[i][j] > 0.0 && !reach[i][j]) {
                    for (std::size_t t = 0; t < a; ++t)
                        if (reach[j][t] && !reach[i][t]) {
                            reach[i][t] = true;
                            changed = true;
                        }
                    reach[i][j] = true;
                    changed = true;
                }
    }
    // state is recurrent iff every reachable state reaches back
    std::vector<bool> recurrent(a, true);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a && recurrent[i]; ++j)
            if (reach[i][j] && !reach[j][i]) recurrent[i] = false;
    int classes = 0;
    std::vector<bool> seen(a, false);
    for (std::size_t i = 0; i < a; ++i) {
        if (!recurrent[i] || seen[i]) continue;
        ++classes;
        for (std::size_t j = 0; j < a; ++j)
            if (reach[i][j] && reach[j][i]) seen[j] = true;
    }
    return classes;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double shannon_entropy_bits(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

std::uint32_t ParamSource::dim() const {
    return kind == SourceKind::Memoryless ? alphabet - 1 : alphabet * (alphabet - 1);
}

void ParamSource::validate() const {
    if (alphabet < 2 || alphabet > 256)
        throw std::invalid_argument("ParamSource: alphabet size must be in [2, 256]");
    if (kind == SourceKind::Memoryless) {
        check_distribution(symbol_probs, alphabet, "symbol_probs");
    } else {
        if (rows.size() != alphabet)
            throw std::invalid_argument("ParamSource: markov needs one row per state");
        for (const auto& r : rows) check_distribution(r, alphabet, "transition row");
        check_distribution(initial, alphabet, "initial distribution");
    }
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& rows) {
    const std::size_t a = rows.size();
    if (a == 0) throw std::invalid_argument("stationary_distribution: empty matrix");
    if (count_closed_classes(rows) != 1)
        throw std::invalid_argument("stationary_distribution: chain has no unique stationary distribution");

    // damped (lazy) iteration pi <- pi*(P+I)/2 removes periodicity issues
    std::vector<double> pi(a, 1.0 / a), next(a);
    for (int iter = 0; iter < 200000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < a; ++s) {
            const double mass = pi[s];
            if (mass == 0.0) continue;
            next[s] += 0.5 * mass;
            const auto& row = rows[s];
            for (std::size_t t = 0; t < a; ++t) next[t] += 0.5 * mass * row[t];
        }
        double norm = 0.0;
        for (double x : next) norm += x;
        for (auto& x : next) x /= norm;
        double delta = 0.0;
        for (std::size_t s = 0; s < a; ++s) delta = std::max(delta, std::abs(next[s] - pi[s]));
        pi.swap(next);
        if (delta < 1e-12) return pi;
    }
    throw std::invalid_argument("stationary_distribution: power iteration did not converge");
}

ParamSource sample_jeffreys(SourceKind kind, Alphabet alphabet, std::uint64_t seed) {
    if (alphabet.size < 2 || alphabet.size > 256)
        throw std::invalid_argument("sample_jeffreys: alphabet size must be in [2, 256]");
    std::mt19937_64 rng(seed);
    ParamSource src;
    src.kind = kind;
    src.alphabet = alphabet.size;
    if (kind == SourceKind::Memoryless) {
        src.symbol_probs = dirichlet_half(alphabet.size, rng);
    } else {
        src.rows.reserve(alphabet.size);
        for (std::uint32_t s = 0; s < alphabet.size; ++s)
            src.rows.push_back(dirichlet_half(alphabet.size, rng));
        src.initial = stationary_distribution(src.rows);
    }
    return src;
}

Packet generate(const ParamSource& source, std::uint32_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Packet pkt;
    pkt.symbols.resize(n);
    if (source.kind == SourceKind::Memoryless) {
        const auto cum = cumulative(source.symbol_probs);
        for (std::uint32_t t = 0; t < n; ++t)
            pkt.symbols[t] = sample_categorical(cum, unif(rng));
    } else {
        std::vector<std::vector<double>> cum_rows;
        cum_rows.reserve(source.alphabet);
        for (const auto& row : source.rows) cum_rows.push_back(cumulative(row));
        const auto cum0 = cumulative(source.initial);
        pkt.symbols[0] = sample_categorical(cum0, unif(rng));
        for (std::uint32_t t = 1; t < n; ++t)
            pkt.symbols[t] = sample_categorical(cum_rows[pkt.symbols[t - 1]], unif(rng));
    }
    return pkt;
}

double entropy_per_packet(const ParamSource& source, std::uint64_t n) {
    source.validate();
    if (source.kind == SourceKind::Memoryless)
        return static_cast<double>(n) * shannon_entropy_bits(source.symbol_probs);
    const auto pi = stationary_distribution(source.rows);
    double chain = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s)
        if (pi[s] > 0.0) chain += pi[s] * shannon_entropy_bits(source.rows[s]);
    return shannon_entropy_bits(source.initial) + static_cast<double>(n - 1) * chain;
}

double ideal_codelength_bits(const ParamSource& source, const Packet& packet) {
    double bits = 0.0;
    const auto charge = [&bits](double p) {
        if (p <= 0.0) {
            bits = std::numeric_limits<double>::infinity();
            return false;
        }
        bits -= std::log2(p);
        return true;
    };
    if (source.kind == SourceKind::Memoryless) {
        for (std::uint8_t x : packet.symbols)
            if (!charge(source.symbol_probs[x])) return bits;
    } else {
        if (packet.symbols.empty()) return 0.0;
        if (!charge(source.initial[packet.symbols[0]])) return bits;
        for (std::size_t t = 1; t < packet.symbols.size(); ++t)
            if (!charge(source.rows[packet.symbols[t - 1]][packet.symbols[t]])) return bits;
    }
    return bits;
}

} // namespace mixcomp
