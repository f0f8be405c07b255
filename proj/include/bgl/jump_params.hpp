#pragma once

#include <bgl/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace bgl {

enum class CkSource {
    formula,   // E_k from the regularity constants, extended to k = 1
    explicit_  // C_1 = 140 C for k = 1, E_k otherwise
};

struct RegularityConstants {
    double c = 0.009;
    double C = 1.0;
};

inline double little_c1(double c) { return std::min(std::pow(2.0, -2.5) * c, 0.125); }

inline double little_ck(int k, double c) {
    const double ratio = std::pow(3 - std::pow(2.0, 1.5), 1.5) * 0.5 * std::pow(5.0, -1.5);
    return std::pow(ratio, k - 1) * little_c1(c);
}

inline double big_d(int k, double c) {
    const int kk = std::max(k, 2);
    const double a = std::cbrt(static_cast<double>(kk)) * std::pow(little_ck(kk, c), -1.0 / 3.0) *
                     std::pow(std::pow(2.0, -4.5) - std::pow(2.0, -5.0), -1.0 / 3.0);
    return std::max({a, 36.0 * (kk * kk - 1), 2.0});
}

inline double big_e(int k, double c, double C) {
    const double a = 10 * std::pow(20.0, k - 1) * std::pow(5.0, k / 2.0) *
                     std::pow(10 / (3 - std::pow(2.0, 1.5)), k * (k - 1) / 2.0) * C;
    return std::max(a, std::exp(c / 2));
}

inline double big_ck(int k, double c, double C, CkSource src) {
    if (k == 1 && src == CkSource::explicit_) return 140 * C;
    return big_e(k, c, C);
}

struct JumpParams {
    double epsilon = 1e-3;
    int k = 1;
    double d = 1.0;
    RegularityConstants reg;
    double konst = 1.0;  // the unnamed constant of the epsilon window
    CkSource ck_source = CkSource::formula;
    long long n = 0;  // curve count of the ensemble; 0 means unbounded

    // derived
    double c_k = 0, D_k = 0, C_k = 0, T = 0, d_ip = 0, R = 0;

    static JumpParams make(double epsilon, int k, double d, RegularityConstants reg = {}, double konst = 1.0,
                           CkSource src = CkSource::formula, long long n = 0, bool enforce_window = true) {
        JumpParams p;
        p.epsilon = epsilon;
        p.k = k;
        p.d = d;
        p.reg = reg;
        p.konst = konst;
        p.ck_source = src;
        p.n = n;
        if (!(epsilon > 0 && epsilon < 1)) throw ParameterError("jump: epsilon must lie in (0,1)");
        if (k < 1) throw ParameterError("jump: k must be >= 1");
        if (!(d >= 1)) throw ParameterError("jump: d must be >= 1");
        if (!(reg.c > 0 && reg.C > 0 && konst > 0)) throw ParameterError("jump: constants must be positive");
        p.c_k = little_ck(k, reg.c);
        p.D_k = big_d(k, reg.c);
        p.C_k = big_ck(k, reg.c, reg.C, src);
        p.T = p.D_k * std::cbrt(std::log(1 / epsilon));
        p.d_ip = 5 * d;
        p.R = 6 * std::sqrt(d);
        if (enforce_window) p.check_window();
        return p;
    }

    double epsilon_upper() const {
        const double a = std::exp(-1.0);
        const double b = std::pow(17.0, -1.0 / k) * std::pow(C_k, -1.0 / k) / konst;
        const double c = std::exp(-std::pow(24.0, 6) * std::pow(d, 6) / (D_k * D_k * D_k));
        return std::min({a, b, c});
    }

    double epsilon_lower() const {
        if (n <= 0) return 0.0;
        return std::exp(-std::min(reg.c / 2, std::sqrt(2.0)) / konst * std::pow(static_cast<double>(n), 1.0 / 12));
    }

    void check_window() const {
        const double up = epsilon_upper(), lo = epsilon_lower();
        if (!(epsilon < up) || !(epsilon > lo)) {
            std::ostringstream os;
            os << "jump: epsilon=" << epsilon << " violates the window " << lo
               << " < epsilon < min(e^-1, 17^{-1/k} C_k^{-1/k} const^-1, exp(-24^6 d^6 / D_k^3)) = " << up;
            throw ParameterError(os.str());
        }
    }

    // exponent a in P(Fav^c) <= epsilon^a
    double fav_exponent() const { return std::pow(2.0, -5) * c_k * D_k * D_k * D_k; }
    // log of the Pass lower bound on Fav
    double log_pass_lower_bound() const {
        return -3973 * std::pow(k, 3.5) * d_ip * d_ip * D_k * D_k * std::pow(std::log(1 / epsilon), 2.0 / 3.0);
    }
};

}  // namespace bgl
