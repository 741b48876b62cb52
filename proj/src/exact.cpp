#include "gtdet/exact.hpp"

#include <string>

#include "gtdet/errors.hpp"

namespace gtdet {

Rational det_exact(RationalMatrix a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a[p][k] == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            std::swap(a[p], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a[i][k] == 0) continue;
            Rational f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

Rational parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos)
            return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                            boost::multiprecision::cpp_int(s.substr(slash + 1)));
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        boost::multiprecision::cpp_int den = 1;
        for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
        return Rational(boost::multiprecision::cpp_int(digits), den);
    } catch (const std::exception&) {
        throw ArgumentError("cannot parse rational '" + s + "'");
    }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace gtdet
