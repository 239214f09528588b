#include "hsvol/estimation.hpp"

#include "dual.hpp"
#include "hsvol/error.hpp"
#include "hsvol/innovations.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hsvol {

namespace {

using detail::Dual;
using detail::value_of;

constexpr std::size_t kMaxParams = 6;
using D = Dual<kMaxParams>;

enum class LvKind { Constant, Proportional, Displaced };
enum class SvKind { None, Ewma, Garch };

LvKind lv_kind(const LocalVolSpec& lv) {
    if (std::holds_alternative<ConstantVol>(lv.kind())) return LvKind::Constant;
    if (std::holds_alternative<ProportionalVol>(lv.kind())) return LvKind::Proportional;
    return LvKind::Displaced;
}

SvKind sv_kind(const StochVolSpec& sv) {
    if (std::holds_alternative<NoStochVol>(sv.kind())) return SvKind::None;
    if (std::holds_alternative<EwmaVol>(sv.kind())) return SvKind::Ewma;
    return SvKind::Garch;
}

struct Shape {
    LvKind lv;
    SvKind sv;

    [[nodiscard]] std::size_t lv_count() const { return lv == LvKind::Displaced ? 3 : 1; }
    [[nodiscard]] std::size_t sv_count() const { return sv == SvKind::Garch ? 3 : (sv == SvKind::Ewma ? 1 : 0); }
    [[nodiscard]] std::size_t size() const { return lv_count() + sv_count(); }
};

Shape shape_of(const LocalVolSpec& lv, const StochVolSpec& sv) { return {lv_kind(lv), sv_kind(sv)}; }

template <class T>
struct Model {
    Shape shape;
    T sigma{1.0};
    T alpha{0.0};
    T beta{0.0};
    T a0{0.0};
    T a1{0.0};
    T b1{0.0};
};

// Natural vector layout: sigma [alpha beta] then a0 a1 b1 | lambda.
template <class T>
Model<T> model_from_natural(const Shape& shape, const std::vector<T>& p) {
    Model<T> m{shape};
    std::size_t i = 0;
    m.sigma = p[i++];
    if (shape.lv == LvKind::Displaced) {
        m.alpha = p[i++];
        m.beta = p[i++];
    }
    if (shape.sv == SvKind::Garch) {
        m.a0 = p[i++];
        m.a1 = p[i++];
        m.b1 = p[i++];
    } else if (shape.sv == SvKind::Ewma) {
        const T lambda = p[i++];
        m.a0 = T(0.0);
        m.a1 = 1.0 - lambda;
        m.b1 = lambda;
    }
    return m;
}

template <class T>
T gamma_of(const Model<T>& m, double x, std::size_t index) {
    T g;
    switch (m.shape.lv) {
    case LvKind::Constant: g = m.sigma; break;
    case LvKind::Proportional: g = m.sigma * x; break;
    case LvKind::Displaced: {
        using std::abs;
        using detail::abs;
        g = ((1.0 - abs(m.alpha)) * x + m.alpha * m.beta) * m.sigma;
        break;
    }
    }
    if (!(value_of(g) > 0.0) || !std::isfinite(value_of(g))) {
        throw Error(ErrorKind::NonpositiveVolatility, "local volatility not positive at step " + std::to_string(index),
                    index);
    }
    return g;
}

template <class T>
T log_likelihood(const std::vector<double>& s, const Model<T>& m, const InitRule& init, bool drop_first) {
    using std::log;
    using detail::log;
    const std::size_t n = s.size() - 1;

    T h(1.0);
    if (m.shape.sv != SvKind::None) {
        auto warmup = [&]() {
            const std::size_t count = std::min(std::max<std::size_t>(init.warmup, 1), n);
            T sum(0.0);
            for (std::size_t k = 1; k <= count; ++k) {
                const T r = (s[k] - s[k - 1]) / gamma_of(m, s[k - 1], k - 1);
                sum += r * r;
            }
            return sum / static_cast<double>(count);
        };
        switch (init.kind) {
        case InitRule::Kind::Fixed: h = T(init.fixed_v0 * init.fixed_v0); break;
        case InitRule::Kind::WarmupSecondMoment: h = warmup(); break;
        case InitRule::Kind::Unconditional:
            if (m.shape.sv != SvKind::Garch) {
                throw Error(ErrorKind::InvalidParameter, "unconditional v0 requires a GARCH filter");
            }
            h = m.a0 / (1.0 - m.a1 - m.b1);
            break;
        case InitRule::Kind::Default:
            h = m.shape.sv == SvKind::Garch ? m.a0 / (1.0 - m.a1 - m.b1) : warmup();
            break;
        }
    }

    T total(0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        if (!(value_of(h) > 0.0)) {
            throw Error(ErrorKind::NonpositiveVolatility, "filtered variance not positive at step " +
                                                              std::to_string(k - 1),
                        k - 1);
        }
        const double ds = s[k] - s[k - 1];
        const T g = gamma_of(m, s[k - 1], k - 1);
        const T g2 = g * g;
        if (!(drop_first && k == 1)) {
            total += log(h) + log(g2) + (ds * ds) / (h * g2);
        }
        if (m.shape.sv != SvKind::None) {
            const T r = ds / g;
            h = m.a0 + m.a1 * (r * r) + m.b1 * h;
        }
    }
    total = total * -0.5;
    if (!std::isfinite(value_of(total))) {
        throw Error(ErrorKind::NumericalFailure, "quasi-log-likelihood is not finite");
    }
    return total;
}

std::vector<double> natural_values(const LocalVolSpec& lv, const StochVolSpec& sv) {
    std::vector<double> p;
    p.push_back(lv.sigma());
    if (const auto* d = std::get_if<DisplacedVol>(&lv.kind())) {
        p.push_back(d->alpha);
        p.push_back(d->beta);
    }
    if (const auto* g = std::get_if<GarchVol>(&sv.kind())) {
        p.push_back(g->a0);
        p.push_back(g->a1);
        p.push_back(g->b1);
    } else if (const auto* e = std::get_if<EwmaVol>(&sv.kind())) {
        p.push_back(e->lambda);
    }
    return p;
}

std::string format_vector(const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(17);
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << (i ? ", " : "") << v[i];
    }
    out << ')';
    return out.str();
}

// Unconstrained parametrization of the free parameters.

enum class Transform { Log, Tanh, Identity, Logistic, BoundedLogistic, Persistence, Share };

struct Slot {
    std::size_t natural;  // index in the natural vector (Persistence/Share: index of a1)
    Transform transform;
    double bound = 1.0;   // BoundedLogistic upper bound
};

double logit(double p) {
    p = std::clamp(p, 1e-9, 1.0 - 1e-9);
    return std::log(p / (1.0 - p));
}

template <class T>
T logistic(const T& u) {
    using std::exp;
    using detail::exp;
    return 1.0 / (1.0 + exp(-u));
}

struct Layout {
    Shape shape;
    std::vector<Slot> slots;
    std::vector<double> fixed;  // natural vector holding template / start values

    template <class T>
    std::vector<T> to_natural(const std::vector<T>& u) const {
        using std::exp;
        using std::tanh;
        using detail::exp;
        using detail::tanh;
        std::vector<T> p(fixed.begin(), fixed.end());
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const auto& slot = slots[i];
            switch (slot.transform) {
            case Transform::Log: p[slot.natural] = exp(u[i]); break;
            case Transform::Tanh: p[slot.natural] = tanh(u[i]); break;
            case Transform::Identity: p[slot.natural] = u[i]; break;
            case Transform::Logistic: p[slot.natural] = logistic(u[i]); break;
            case Transform::BoundedLogistic: p[slot.natural] = slot.bound * logistic(u[i]); break;
            case Transform::Persistence: {
                const T persistence = logistic(u[i]);
                const T share = logistic(u[i + 1]);
                p[slot.natural] = persistence * share;
                p[slot.natural + 1] = persistence * (1.0 - share);
                break;
            }
            case Transform::Share: break;
            }
        }
        return p;
    }

    [[nodiscard]] std::vector<double> to_unconstrained(const std::vector<double>& p) const {
        std::vector<double> u(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const auto& slot = slots[i];
            const double x = p[slot.natural];
            switch (slot.transform) {
            case Transform::Log: u[i] = std::log(x); break;
            case Transform::Tanh: u[i] = std::atanh(std::clamp(x, -1.0 + 1e-9, 1.0 - 1e-9)); break;
            case Transform::Identity: u[i] = x; break;
            case Transform::Logistic: u[i] = logit(x); break;
            case Transform::BoundedLogistic: u[i] = logit(x / slot.bound); break;
            case Transform::Persistence: {
                const double persistence = x + p[slot.natural + 1];
                u[i] = logit(persistence);
                u[i + 1] = logit(persistence > 0.0 ? x / persistence : 0.5);
                break;
            }
            case Transform::Share: break;
            }
        }
        return u;
    }
};

Layout make_layout(const Shape& shape, const FreeMask& free, const std::vector<double>& start) {
    Layout layout{shape, {}, start};
    layout.slots.reserve(kMaxParams);
    auto reject = [](const char* name, const char* why) {
        throw Error(ErrorKind::InvalidParameter, std::string("cannot free '") + name + "': " + why);
    };
    if (free.sigma) layout.slots.push_back({0, Transform::Log});
    if (shape.lv == LvKind::Displaced) {
        if (free.alpha) layout.slots.push_back({1, Transform::Tanh});
        if (free.beta) layout.slots.push_back({2, Transform::Identity});
    } else {
        if (free.alpha) reject("alpha", "local volatility is not displaced");
        if (free.beta) reject("beta", "local volatility is not displaced");
    }
    const std::size_t sv0 = shape.lv_count();
    if (shape.sv == SvKind::Garch) {
        if (free.a0) layout.slots.push_back({sv0, Transform::Log});
        if (free.a1 && free.b1) {
            layout.slots.push_back({sv0 + 1, Transform::Persistence});
            layout.slots.push_back({sv0 + 1, Transform::Share});
        } else if (free.a1) {
            layout.slots.push_back({sv0 + 1, Transform::BoundedLogistic, 1.0 - start[sv0 + 2]});
        } else if (free.b1) {
            layout.slots.push_back({sv0 + 2, Transform::BoundedLogistic, 1.0 - start[sv0 + 1]});
        }
    } else if (shape.sv == SvKind::Ewma) {
        if (free.lambda) layout.slots.push_back({sv0, Transform::Logistic});
    }
    return layout;
}

struct Evaluation {
    double f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;
};

class Objective {
public:
    Objective(const std::vector<double>& s, const Layout& layout, const InitRule& init, bool drop_first)
        : s_(s), layout_(layout), init_(init), drop_first_(drop_first),
          terms_(static_cast<double>(s.size() - 1 - (drop_first ? 1 : 0))) {}

    // Minimizes the negative mean log-likelihood.
    [[nodiscard]] Evaluation operator()(const Eigen::VectorXd& u) const {
        const auto n = static_cast<std::size_t>(u.size());
        std::vector<D> ud(n);
        for (std::size_t i = 0; i < n; ++i) {
            ud[i] = D::variable(u(static_cast<Eigen::Index>(i)), i);
        }
        Evaluation out;
        out.grad = Eigen::VectorXd::Zero(u.size());
        try {
            const auto model = model_from_natural(layout_.shape, layout_.to_natural(ud));
            const D ll = log_likelihood(s_, model, init_, drop_first_);
            out.f = -ll.v / terms_;
            for (std::size_t i = 0; i < n; ++i) {
                out.grad(static_cast<Eigen::Index>(i)) = -ll.d[i] / terms_;
            }
            if (!out.grad.allFinite()) {
                out.f = std::numeric_limits<double>::infinity();
            }
        } catch (const Error&) {
            out.f = std::numeric_limits<double>::infinity();
        }
        return out;
    }

private:
    const std::vector<double>& s_;
    const Layout& layout_;
    const InitRule& init_;
    bool drop_first_;
    double terms_;
};

struct RunResult {
    Eigen::VectorXd u;
    double f = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    std::string message;
};

RunResult bfgs(const Objective& objective, Eigen::VectorXd x, const QmleOptions& opts) {
    const auto n = x.size();
    Evaluation current = objective(x);
    RunResult run{x, current.f, false, 0, std::numeric_limits<double>::infinity(), {}};
    if (!std::isfinite(current.f)) {
        run.message = "objective not finite at start";
        return run;
    }
    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    bool identity = true;
    constexpr double kMaxStep = 2.0;

    for (run.iterations = 0; run.iterations < opts.max_iterations; ++run.iterations) {
        if (current.grad.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
            run.converged = true;
            run.message = "gradient tolerance reached";
            break;
        }
        Eigen::VectorXd dir = -inv_hessian * current.grad;
        double slope = current.grad.dot(dir);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            identity = true;
            dir = -current.grad;
            slope = current.grad.dot(dir);
        }
        const double longest = dir.lpNorm<Eigen::Infinity>();
        if (longest > kMaxStep) {
            dir *= kMaxStep / longest;
            slope *= kMaxStep / longest;
        }

        double t = 1.0;
        Evaluation next;
        Eigen::VectorXd candidate;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries, t *= 0.5) {
            candidate = x + t * dir;
            next = objective(candidate);
            if (std::isfinite(next.f) && next.f <= current.f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!identity) {
                inv_hessian.setIdentity();
                identity = true;
                continue;
            }
            run.message = "line search failed to improve the objective";
            break;
        }

        const Eigen::VectorXd step = candidate - x;
        const Eigen::VectorXd dgrad = next.grad - current.grad;
        const double f_change = current.f - next.f;
        x = candidate;
        current = next;

        if (step.lpNorm<Eigen::Infinity>() <= opts.param_tolerance * (1.0 + x.lpNorm<Eigen::Infinity>()) &&
            f_change <= 1e-15 * (1.0 + std::abs(current.f))) {
            run.converged = true;
            run.message = "parameter tolerance reached";
            ++run.iterations;
            break;
        }

        const double sy = step.dot(dgrad);
        if (sy > 1e-12 * step.norm() * dgrad.norm()) {
            if (identity) {
                inv_hessian *= sy / dgrad.squaredNorm();
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            inv_hessian = (eye - rho * step * dgrad.transpose()) * inv_hessian *
                              (eye - rho * dgrad * step.transpose()) +
                          rho * step * step.transpose();
            identity = false;
        }
    }
    if (run.iterations >= opts.max_iterations && !run.converged) {
        run.message = "iteration budget exhausted";
    }
    run.u = x;
    run.f = current.f;
    run.gradient_norm = current.grad.lpNorm<Eigen::Infinity>();
    return run;
}

} // namespace

double qmle_objective(const PriceSeries& series, const LocalVolSpec& lv, const StochVolSpec& sv,
                      const InitRule& init, bool drop_first) {
    const auto shape = shape_of(lv, sv);
    const auto model = model_from_natural(shape, natural_values(lv, sv));
    return log_likelihood(series.values(), model, init, drop_first);
}

std::vector<std::string> qmle_parameter_names(const LocalVolSpec& lv, const StochVolSpec& sv) {
    const auto shape = shape_of(lv, sv);
    std::vector<std::string> names{"sigma"};
    if (shape.lv == LvKind::Displaced) {
        names.insert(names.end(), {"alpha", "beta"});
    }
    if (shape.sv == SvKind::Garch) {
        names.insert(names.end(), {"a0", "a1", "b1"});
    } else if (shape.sv == SvKind::Ewma) {
        names.emplace_back("lambda");
    }
    return names;
}

std::vector<double> qmle_parameter_values(const LocalVolSpec& lv, const StochVolSpec& sv) {
    return natural_values(lv, sv);
}

std::pair<LocalVolSpec, StochVolSpec> qmle_specs_from_values(const LocalVolSpec& lv_shape,
                                                             const StochVolSpec& sv_shape,
                                                             const std::vector<double>& p) {
    const auto shape = shape_of(lv_shape, sv_shape);
    if (p.size() != shape.size()) {
        throw Error(ErrorKind::InvalidParameter, "parameter vector has the wrong length");
    }
    const auto lv = [&]() -> LocalVolSpec {
        switch (shape.lv) {
        case LvKind::Constant: return ConstantVol{p[0]};
        case LvKind::Proportional: return ProportionalVol{p[0]};
        case LvKind::Displaced: return DisplacedVol{p[1], p[2], p[0]};
        }
        return ConstantVol{p[0]};
    }();
    const std::size_t i = shape.lv_count();
    const auto sv = [&]() -> StochVolSpec {
        switch (shape.sv) {
        case SvKind::None: return NoStochVol{};
        case SvKind::Ewma: return EwmaVol{p[i]};
        case SvKind::Garch: return GarchVol{p[i], p[i + 1], p[i + 2]};
        }
        return NoStochVol{};
    }();
    return {lv, sv};
}

std::vector<double> qmle_gradient(const PriceSeries& series, const LocalVolSpec& lv, const StochVolSpec& sv,
                                  const InitRule& init, bool drop_first) {
    const auto shape = shape_of(lv, sv);
    const auto p = natural_values(lv, sv);
    std::vector<D> pd(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        pd[i] = D::variable(p[i], i);
    }
    const D ll = log_likelihood(series.values(), model_from_natural(shape, pd), init, drop_first);
    return {ll.d.begin(), ll.d.begin() + static_cast<long>(p.size())};
}

FreeMask FreeMask::parse(const std::string& names) {
    FreeMask mask = none();
    std::istringstream in(names);
    std::string name;
    while (std::getline(in, name, ',')) {
        name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }),
                   name.end());
        if (name == "sigma") mask.sigma = true;
        else if (name == "alpha") mask.alpha = true;
        else if (name == "beta") mask.beta = true;
        else if (name == "a0") mask.a0 = true;
        else if (name == "a1") mask.a1 = true;
        else if (name == "b1") mask.b1 = true;
        else if (name == "lambda") mask.lambda = true;
        else if (!name.empty()) {
            throw Error(ErrorKind::InvalidParameter, "unknown parameter '" + name + "' in free mask");
        }
    }
    return mask;
}

QmleFit fit_qmle(const PriceSeries& series, const LocalVolSpec& lv_template, const StochVolSpec& sv_template,
                 const FreeMask& free, const InitRule& init, const QmleOptions& opts) {
    if (series.size() < opts.min_length) {
        throw Error(ErrorKind::SeriesTooShort, "QMLE needs at least " + std::to_string(opts.min_length) +
                                                   " observations, got " + std::to_string(series.size()));
    }
    const auto shape = shape_of(lv_template, sv_template);
    const auto values = series.values();
    const auto returns = filtered_returns(series, lv_template);

    // Default start: a0 = 0.1 var(r), a1 = 0.05, b1 = 0.90, lambda = template.
    std::vector<double> start = natural_values(lv_template, sv_template);
    const std::size_t sv0 = shape.lv_count();
    if (shape.sv == SvKind::Garch) {
        double mean = 0.0;
        double second = 0.0;
        for (double r : returns) {
            mean += r;
            second += r * r;
        }
        mean /= static_cast<double>(returns.size());
        second /= static_cast<double>(returns.size());
        const double variance = second - mean * mean;
        if (free.a0) {
            const double base = variance > 0.0 ? variance : second;
            start[sv0] = base > 0.0 ? 0.1 * base : start[sv0];
        }
        if (free.a1 && free.b1) {
            start[sv0 + 1] = 0.05;
            start[sv0 + 2] = 0.90;
        } else if (free.a1) {
            start[sv0 + 1] = std::min(0.05, 0.5 * (1.0 - start[sv0 + 2]));
        } else if (free.b1) {
            start[sv0 + 2] = std::min(0.90, 0.95 * (1.0 - start[sv0 + 1]));
        }
    }
    const auto layout = make_layout(shape, free, start);
    if (layout.slots.empty()) {
        throw Error(ErrorKind::InvalidParameter, "free mask selects no parameter of this model");
    }
    const auto [start_lv, start_sv] = qmle_specs_from_values(lv_template, sv_template, start);

    QmleFit fit{start_lv, start_sv, 0.0, 0.0, false, 0, 0.0, {}, {}};
    fit.start_loglik = qmle_objective(series, start_lv, start_sv, init, opts.drop_first);
    fit.loglik = fit.start_loglik;

    const bool flat = std::all_of(returns.begin(), returns.end(), [](double r) { return r == 0.0; });
    if (flat) {
        fit.start_points.push_back(start);
        fit.message = "flat series: every increment is zero, the likelihood is unbounded";
        return fit;
    }

    const Objective objective(values, layout, init, opts.drop_first);
    const auto u0_vec = layout.to_unconstrained(start);
    const Eigen::VectorXd u0 = Eigen::Map<const Eigen::VectorXd>(u0_vec.data(), static_cast<Eigen::Index>(u0_vec.size()));

    std::optional<RunResult> best;
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    const std::size_t starts = std::max<std::size_t>(opts.starts, 1);
    for (std::size_t j = 0; j < starts; ++j) {
        Eigen::VectorXd u = u0;
        if (j > 0) {
            for (Eigen::Index i = 0; i < u.size(); ++i) {
                u(i) += jitter(rng);
            }
        }
        std::vector<double> uv(u.data(), u.data() + u.size());
        fit.start_points.push_back(layout.to_natural(uv));
        auto run = bfgs(objective, u, opts);
        if (!std::isfinite(run.f)) {
            continue;
        }
        if (!best || run.f < best->f) {
            best = std::move(run);
        }
    }
    if (!best) {
        throw Error(ErrorKind::NumericalFailure,
                    "quasi-log-likelihood not finite at any start; default start " + format_vector(start));
    }

    std::vector<double> u_best(best->u.data(), best->u.data() + best->u.size());
    const auto natural = layout.to_natural(u_best);
    try {
        const auto [lv, sv] = qmle_specs_from_values(lv_template, sv_template, natural);
        fit.local_vol = lv;
        fit.stoch_vol = sv;
        fit.loglik = qmle_objective(series, lv, sv, init, opts.drop_first);
    } catch (const Error& e) {
        throw Error(ErrorKind::NumericalFailure,
                    std::string("optimum left the feasible set at ") + format_vector(natural) + ": " + e.what());
    }
    fit.converged = best->converged;
    fit.iterations = best->iterations;
    fit.gradient_norm = best->gradient_norm;
    fit.message = best->message;
    return fit;
}

} // namespace hsvol
