#include "bubbletower/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bt {

namespace {

double smooth_bump(double x) {
    // C^inf bump supported on |x| < 1, normalized to 1 at x = 0.
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

} // namespace

double eval_K(const CurvatureModel& model, double r) {
    if (r < 0.0) throw std::invalid_argument("eval_K: negative radius");
    double v = 1.0 - model.c0 * std::pow(std::abs(r - model.r0), model.m);
    v = std::max(v, model.floor);
    if (model.kind == CurvatureKind::power_plus_bump)
        v += model.bump_amp * smooth_bump((r - model.bump_center) / model.bump_width);
    return v;
}

double eval_K_derivative(const CurvatureModel& model, double r) {
    if (r < 0.0) throw std::invalid_argument("eval_K_derivative: negative radius");
    const double d = r - model.r0;
    double v = 0.0;
    if (1.0 - model.c0 * std::pow(std::abs(d), model.m) > model.floor) {
        const double sgn = d >= 0.0 ? 1.0 : -1.0;
        v = -model.c0 * model.m * std::pow(std::abs(d), model.m - 1.0) * sgn;
    }
    if (model.kind == CurvatureKind::power_plus_bump) {
        const double x = (r - model.bump_center) / model.bump_width;
        if (std::abs(x) < 1.0) {
            const double u = 1.0 - x * x;
            v += model.bump_amp * smooth_bump(x) * (-2.0 * x / (u * u)) / model.bump_width;
        }
    }
    return v;
}

CurvatureModel ProblemParams::curvature() const {
    CurvatureModel mdl;
    mdl.kind = model_kind;
    mdl.c0 = c0;
    mdl.r0 = r0;
    mdl.m = m;
    mdl.theta_K = theta_K;
    mdl.floor = k_floor;
    mdl.bump_center = r0 + 2.0 * delta;
    mdl.bump_width = 0.5 * delta;
    return mdl;
}

Rational mu_exponent(const ProblemParams& p) {
    if (p.m != std::floor(p.m))
        throw std::invalid_argument("mu_exponent: exact form needs integral m");
    const long long mi = static_cast<long long>(p.m);
    if (p.N - 2 - mi <= 0) throw std::invalid_argument("mu_exponent: need m < N-2");
    return {p.N - 2, p.N - 2 - mi};
}

double mu_of_k(const ProblemParams& p) {
    if (p.k < 1) throw std::invalid_argument("mu_of_k: k must be >= 1");
    if (p.N - 2.0 - p.m <= 0.0) throw std::invalid_argument("mu_of_k: need m < N-2");
    if (p.m == std::floor(p.m)) {
        const Rational e = mu_exponent(p);
        const long long whole = e.num / e.den;
        const long long rem = e.num % e.den;
        double v = pow_int(static_cast<double>(p.k), whole);
        if (rem != 0) v *= std::pow(static_cast<double>(p.k), static_cast<double>(rem) / e.den);
        return v;
    }
    return std::pow(static_cast<double>(p.k), (p.N - 2.0) / (p.N - 2.0 - p.m));
}

bool AssumptionReport::all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const Item& it) { return it.pass; });
}

AssumptionReport validate_assumptions(const ProblemParams& p) {
    AssumptionReport rep;
    auto add = [&rep](const std::string& name, bool pass, const std::string& detail) {
        rep.items.push_back({name, pass, detail});
    };
    add("N >= 5", p.N >= 5, "N = " + std::to_string(p.N));
    add("2 <= m < N-2", p.m >= 2.0 && p.m < p.N - 2.0,
        "m = " + std::to_string(p.m) + ", N-2 = " + std::to_string(p.N - 2));
    add("c0 > 0", p.c0 > 0.0, "c0 = " + std::to_string(p.c0));
    add("r0 > 0", p.r0 > 0.0, "r0 = " + std::to_string(p.r0));
    add("theta_K > 0", p.theta_K > 0.0, "theta_K = " + std::to_string(p.theta_K));
    add("delta > 0", p.delta > 0.0, "delta = " + std::to_string(p.delta));
    add("k >= 2", p.k >= 2, "k = " + std::to_string(p.k));
    add("1 < tau < 2", p.tau > 1.0 && p.tau < 2.0, "tau = " + std::to_string(p.tau));
    add("theta_bar > 0", p.theta_bar > 0.0, "theta_bar = " + std::to_string(p.theta_bar));
    add("0 < L0 <= L1", p.L0 > 0.0 && p.L0 <= p.L1,
        "L0 = " + std::to_string(p.L0) + ", L1 = " + std::to_string(p.L1));

    // Positivity of K on the window the local law is declared on.
    bool positive = true;
    double worst = 1.0;
    const CurvatureModel mdl = p.curvature();
    if (p.delta > 0.0) {
        for (int i = 0; i <= 200; ++i) {
            const double r = std::max(0.0, p.r0 - p.delta) + (2.0 * p.delta) * i / 200.0;
            const double v = eval_K(mdl, r);
            worst = std::min(worst, v);
            if (v <= mdl.floor) positive = false;
        }
    }
    add("K > floor on (r0-delta, r0+delta)", positive, "min sampled K = " + std::to_string(worst));
    return rep;
}

void require_valid(const ProblemParams& p) {
    const AssumptionReport rep = validate_assumptions(p);
    if (rep.all_pass()) return;
    std::string msg = "invalid parameters:";
    for (const auto& it : rep.items)
        if (!it.pass) msg += " [" + it.name + ": " + it.detail + "]";
    throw std::invalid_argument(msg);
}

namespace {

const std::map<std::string, int>& key_index() {
    static const std::map<std::string, int> keys = {
        {"n", 0},     {"m", 1},         {"c0", 2},    {"r0", 3},
        {"theta_k", 4}, {"delta", 5},   {"k", 6},     {"tau", 7},
        {"theta_bar", 8}, {"l0", 9},    {"l1", 10},   {"model.kind", 11},
        {"k_floor", 12},
    };
    return keys;
}

} // namespace

ProblemParams parse_config(std::istream& in) {
    ProblemParams p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        std::string trimmed = line;
        trimmed.erase(std::remove_if(trimmed.begin(), trimmed.end(),
                                     [](unsigned char c) { return std::isspace(c); }),
                      trimmed.end());
        if (trimmed.empty()) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            s.erase(std::remove_if(s.begin(), s.end(),
                                   [](unsigned char c) { return std::isspace(c); }),
                    s.end());
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return std::tolower(c); });
        };
        strip(key);
        std::string raw = value;
        strip(value);
        if (!key_index().count(key))
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (key == "model.kind") {
            if (value == "exact_power") p.model_kind = CurvatureKind::exact_power;
            else if (value == "power_plus_bump") p.model_kind = CurvatureKind::power_plus_bump;
            else throw std::invalid_argument("config: unknown model.kind '" + value + "'");
            continue;
        }
        double num;
        try {
            num = std::stod(value);
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad number '" + raw + "'");
        }
        switch (key_index().at(key)) {
            case 0: p.N = static_cast<int>(num); break;
            case 1: p.m = num; break;
            case 2: p.c0 = num; break;
            case 3: p.r0 = num; break;
            case 4: p.theta_K = num; break;
            case 5: p.delta = num; break;
            case 6: p.k = static_cast<int>(num); break;
            case 7: p.tau = num; break;
            case 8: p.theta_bar = num; break;
            case 9: p.L0 = num; break;
            case 10: p.L1 = num; break;
            case 12: p.k_floor = num; break;
        }
    }
    return p;
}

ProblemParams load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return parse_config(in);
}

std::string dump_config(const ProblemParams& p) {
    std::ostringstream out;
    out.precision(17);
    out << "n = " << p.N << "\n"
        << "m = " << p.m << "\n"
        << "c0 = " << p.c0 << "\n"
        << "r0 = " << p.r0 << "\n"
        << "theta_k = " << p.theta_K << "\n"
        << "delta = " << p.delta << "\n"
        << "k = " << p.k << "\n"
        << "tau = " << p.tau << "\n"
        << "theta_bar = " << p.theta_bar << "\n"
        << "l0 = " << p.L0 << "\n"
        << "l1 = " << p.L1 << "\n"
        << "model.kind = "
        << (p.model_kind == CurvatureKind::exact_power ? "exact_power" : "power_plus_bump") << "\n"
        << "k_floor = " << p.k_floor << "\n";
    return out.str();
}

} // namespace bt
