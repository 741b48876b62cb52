#include "gtdet/patterns.hpp"

#include <algorithm>

#include <json.hpp>

#include "gtdet/errors.hpp"

namespace gtdet {

bool is_weyl(const WeylConfig& x) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i - 1] < x[i])) return false;
    return true;
}

void require_weyl(const WeylConfig& x, const char* what) {
    if (!is_weyl(x)) throw ArgumentError(std::string(what) + ": entries must be strictly increasing");
}

bool GTPattern::valid() const {
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k].size() != k + 1) return false;
        if (!is_weyl(levels[k])) return false;
        if (k > 0 && !is_interlaced(levels[k - 1], levels[k])) return false;
    }
    return true;
}

bool precedes(const SpaceTimePoint& a, const SpaceTimePoint& b) {
    return a.n >= b.n && a.t <= b.t && !(a.n == b.n && a.t == b.t);
}

bool is_interlaced(const WeylConfig& lower, const WeylConfig& upper) {
    if (lower.size() + 1 != upper.size())
        throw ArgumentError("is_interlaced: upper must have exactly one more entry than lower");
    for (std::size_t k = 0; k < lower.size(); ++k)
        if (!(upper[k] < lower[k] && lower[k] <= upper[k + 1])) return false;
    return true;
}

int interlacing_indicator_det(const WeylConfig& lower, const WeylConfig& upper) {
    const std::size_t n = upper.size();
    if (lower.size() + 1 != n)
        throw ArgumentError("interlacing_indicator_det: size mismatch");
    // Bareiss on a 0/1 matrix; entries stay small for n <= 20.
    std::vector<std::vector<std::int64_t>> a(n, std::vector<std::int64_t>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = (i + 1 == n) ? 1 : (upper[j] >= lower[i] ? 1 : 0);
    int sign = 1;
    std::int64_t prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    std::int64_t d = sign * a[n - 1][n - 1];
    if (d < -1 || d > 1) throw InternalError("interlacing_indicator_det: determinant outside {-1,0,1}");
    return static_cast<int>(d);
}

double vandermonde(const std::vector<double>& x) {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) v *= x[j] - x[i];
    return v;
}

BigInt vandermonde_exact(const WeylConfig& x) {
    BigInt v = 1;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) v *= BigInt(x[j]) - BigInt(x[i]);
    return v;
}

double vandermonde(const WeylConfig& x) {
    return vandermonde(std::vector<double>(x.begin(), x.end()));
}

BigInt count_patterns(const WeylConfig& top) {
    require_weyl(top, "count_patterns");
    BigInt num = vandermonde_exact(top);
    BigInt den = 1, fact = 1;
    for (std::size_t n = 1; n < top.size(); ++n) {
        fact *= n;
        den *= fact;
    }
    if (num % den != 0) throw InternalError("count_patterns: Vandermonde not divisible by superfactorial");
    return num / den;
}

std::vector<WeylConfig> interlacing_lowers(const WeylConfig& upper) {
    std::vector<WeylConfig> out;
    if (upper.empty()) return out;
    const std::size_t m = upper.size() - 1;
    WeylConfig y(m);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == m) {
            out.push_back(y);
            return;
        }
        for (std::int64_t v = upper[k] + 1; v <= upper[k + 1]; ++v) {
            y[k] = v;
            rec(k + 1);
        }
    };
    rec(0);
    return out;
}

namespace detail {
void fill_below(std::vector<WeylConfig>& levels, std::size_t n, const std::function<void()>& leaf) {
    if (n == 0) {
        leaf();
        return;
    }
    const WeylConfig& upper = levels[n];
    WeylConfig& y = levels[n - 1];
    y.resize(n);
    // nested ranges y_k in [upper_k + 1, upper_{k+1}]
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == n) {
            fill_below(levels, n - 1, leaf);
            return;
        }
        for (std::int64_t v = upper[k] + 1; v <= upper[k + 1]; ++v) {
            levels[n - 1][k] = v;
            rec(k + 1);
        }
    };
    rec(0);
}
}  // namespace detail

std::vector<GTPattern> enumerate_patterns(const WeylConfig& top) {
    require_weyl(top, "enumerate_patterns");
    if (top.empty()) throw ArgumentError("enumerate_patterns: empty top level");
    if (top.size() > kEnumerateMaxDepth)
        throw RefusalError("enumerate_patterns: depth " + std::to_string(top.size()) + " exceeds guard of " +
                           std::to_string(kEnumerateMaxDepth));
    std::vector<GTPattern> out;
    for_each_pattern(top, [&](const GTPattern& p) { out.push_back(p); });
    std::sort(out.begin(), out.end());
    return out;
}

GTPattern packed_pattern(int N) {
    if (N < 1) throw ArgumentError("packed_pattern: N must be >= 1");
    GTPattern p;
    p.levels.resize(N);
    for (int n = 1; n <= N; ++n) {
        p.levels[n - 1].resize(n);
        for (int k = 1; k <= n; ++k) p.levels[n - 1][k - 1] = -n - 1 + k;
    }
    return p;
}

std::string to_json(const GTPattern& p) {
    nlohmann::json j;
    j["levels"] = p.levels;
    return j.dump();
}

GTPattern pattern_from_json(const std::string& s) {
    GTPattern p;
    try {
        auto j = nlohmann::json::parse(s);
        p.levels = j.at("levels").get<std::vector<WeylConfig>>();
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("pattern_from_json: ") + e.what());
    }
    if (!p.valid()) throw ArgumentError("pattern_from_json: not a Gelfand-Tsetlin pattern");
    return p;
}

}  // namespace gtdet
