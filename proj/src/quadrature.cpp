#include "rtlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <string>

namespace rtlab {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double s = f(c - dx) + f(c + dx);
        resk += kWgk[j] * s;
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    const double value = resk * h;
    double err = std::abs((resk - resg) * h);
    return {a, b, value, err};
}

} // namespace

QuadResult gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                         int max_intervals) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<Segment> heap;
    Segment s0 = kronrod15(f, a, b);
    heap.push(s0);
    double total = s0.value, err = s0.error;
    int evals = 15;
    int count = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        Segment l = kronrod15(f, worst.a, mid);
        Segment r = kronrod15(f, mid, worst.b);
        evals += 30;
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    total = 0.0;
    err = 0.0;
    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    for (const auto& s : segs) {
        total += s.value;
        err += s.error;
    }
    out.value = sign * total;
    out.error = err;
    out.evaluations = evals;
    out.converged = std::isfinite(total) && std::isfinite(err) &&
                    (err <= std::max(abs_tol, rel_tol * std::abs(total)) || err < 1e-14 * std::abs(total));
    return out;
}

QuadResult gauss_kronrod_upper(const Integrand& f, double a, double rel_tol, double abs_tol,
                               int max_intervals) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const double u = a + t / one_minus;
        const double val = f(u);
        return val == 0.0 ? 0.0 : val / (one_minus * one_minus);
    };
    return gauss_kronrod(g, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

double integrate(const Integrand& f, double a, double b, double rel_tol) {
    QuadResult r = gauss_kronrod(f, a, b, rel_tol);
    if (!r.converged)
        throw QuadratureError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                              "] missed tolerance, error estimate " + std::to_string(r.error));
    return r.value;
}

double integrate_upper(const Integrand& f, double a, double rel_tol) {
    QuadResult r = gauss_kronrod_upper(f, a, rel_tol);
    if (!r.converged)
        throw QuadratureError("quadrature on [" + std::to_string(a) +
                              ", inf) missed tolerance, error estimate " + std::to_string(r.error));
    return r.value;
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double gamma_q(double s, double x) {
    if (x <= 0.0) return 1.0;
    const double log_pref = -x + s * std::log(x) - std::lgamma(s);
    if (x < s + 1.0) {
        // Series for P(s, x).
        double ap = s, sum = 1.0 / s, del = sum;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_pref);
    }
    // Lentz continued fraction for Q(s, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(log_pref) * h;
}

} // namespace rtlab
