#include "feller/coefficient_field.hpp"

#include <cmath>

#include "feller/errors.hpp"

namespace feller {

namespace {

double single(const SigmaParams& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end() || it->second.size() != 1)
        throw InputError("coefficient parameter missing or malformed: " + key);
    return it->second[0];
}

double single_or(const SigmaParams& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (it->second.size() != 1) throw InputError("coefficient parameter malformed: " + key);
    return it->second[0];
}

}  // namespace

std::string sigma_form_name(SigmaForm form) {
    switch (form) {
        case SigmaForm::constant: return "constant";
        case SigmaForm::power: return "power";
        case SigmaForm::power_shifted: return "power_shifted";
        case SigmaForm::neg_linear: return "neg_linear";
        case SigmaForm::gou: return "gou";
        case SigmaForm::linear_vec: return "linear_vec";
        case SigmaForm::neg_cubic: return "neg_cubic";
        case SigmaForm::quadratic: return "quadratic";
        case SigmaForm::custom: return "custom";
    }
    return "custom";
}

SigmaForm sigma_form_from_name(const std::string& name) {
    if (name == "constant") return SigmaForm::constant;
    if (name == "power") return SigmaForm::power;
    if (name == "power_shifted") return SigmaForm::power_shifted;
    if (name == "neg_linear") return SigmaForm::neg_linear;
    if (name == "gou") return SigmaForm::gou;
    if (name == "linear_vec") return SigmaForm::linear_vec;
    if (name == "neg_cubic") return SigmaForm::neg_cubic;
    if (name == "quadratic") return SigmaForm::quadratic;
    throw InputError("unknown sigma form: " + name);
}

CoefficientField CoefficientField::make(SigmaForm form, const SigmaParams& params, int d, int k) {
    CoefficientField cf(d, k, form);
    cf.params_ = params;
    switch (form) {
        case SigmaForm::constant: {
            auto it = params.find("value");
            if (it == params.end() || static_cast<int>(it->second.size()) != d * k)
                throw InputError("constant sigma needs a d*k 'value' list (row-major)");
            Mat m(d, k);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < k; ++j) m(i, j) = it->second[i * k + j];
            cf.eval_into_ = [m](const Vec&, Mat& out) { out = m; };
            cf.meta_.lipschitz_const = 0.0;
            cf.meta_.linear_growth_const = std::max(m.norm(), 1e-300);
            cf.meta_.growth_exponent = 0.0;
            break;
        }
        case SigmaForm::power: {
            double coef = single_or(params, "coef", 1.0);
            double beta = single(params, "beta");
            if (d != 1 || k != 1) throw InputError("power sigma requires d = k = 1");
            cf.eval_into_ = [coef, beta](const Vec& x, Mat& out) {
                out(0, 0) = coef * std::pow(std::abs(x(0)), beta);
            };
            cf.meta_.growth_exponent = beta;
            if (beta <= 1.0) cf.meta_.linear_growth_const = std::abs(coef);
            break;
        }
        case SigmaForm::power_shifted: {
            double coef = single_or(params, "coef", 1.0);
            double beta = single(params, "beta");
            if (d != 1 || k != 1) throw InputError("power_shifted sigma requires d = k = 1");
            cf.eval_into_ = [coef, beta](const Vec& x, Mat& out) {
                out(0, 0) = coef * std::pow(1.0 + std::abs(x(0)), beta);
            };
            cf.meta_.growth_exponent = beta;
            if (beta <= 1.0) {
                cf.meta_.linear_growth_const = std::abs(coef);
                cf.meta_.lipschitz_const = std::abs(coef) * std::max(beta, 0.0);
            }
            break;
        }
        case SigmaForm::neg_linear: {
            if (d != 1 || k != 1) throw InputError("neg_linear sigma requires d = k = 1");
            cf.eval_into_ = [](const Vec& x, Mat& out) { out(0, 0) = -x(0); };
            cf.meta_.lipschitz_const = 1.0;
            cf.meta_.linear_growth_const = 1.0;
            cf.meta_.growth_exponent = 1.0;
            break;
        }
        case SigmaForm::gou: {
            if (d != 1 || k != 2) throw InputError("gou sigma requires d = 1, k = 2");
            cf.eval_into_ = [](const Vec& x, Mat& out) {
                out(0, 0) = x(0);
                out(0, 1) = 1.0;
            };
            cf.meta_.lipschitz_const = 1.0;
            cf.meta_.linear_growth_const = std::sqrt(2.0);
            cf.meta_.growth_exponent = 1.0;
            break;
        }
        case SigmaForm::linear_vec: {
            auto it = params.find("c");
            if (it == params.end() || static_cast<int>(it->second.size()) != k)
                throw InputError("linear_vec sigma needs a length-k 'c' list");
            if (d != 1) throw InputError("linear_vec sigma requires d = 1");
            Vec c(k);
            for (int j = 0; j < k; ++j) c(j) = it->second[j];
            cf.eval_into_ = [c](const Vec& x, Mat& out) {
                for (int j = 0; j < c.size(); ++j) out(0, j) = x(0) * c(j);
            };
            cf.meta_.lipschitz_const = c.norm();
            cf.meta_.linear_growth_const = c.norm();
            cf.meta_.growth_exponent = 1.0;
            break;
        }
        case SigmaForm::neg_cubic: {
            if (d != 1 || k != 1) throw InputError("neg_cubic sigma requires d = k = 1");
            cf.eval_into_ = [](const Vec& x, Mat& out) { out(0, 0) = -x(0) * x(0) * x(0); };
            cf.meta_.growth_exponent = 3.0;
            break;
        }
        case SigmaForm::quadratic: {
            if (d != 1 || k != 1) throw InputError("quadratic sigma requires d = k = 1");
            cf.eval_into_ = [](const Vec& x, Mat& out) { out(0, 0) = x(0) * x(0); };
            cf.meta_.growth_exponent = 2.0;
            break;
        }
        case SigmaForm::custom:
            throw InputError("custom sigma cannot be built from parameters");
    }
    return cf;
}

CoefficientField CoefficientField::custom(int d, int k, std::function<void(const Vec&, Mat&)> eval,
                                          SigmaMetadata meta, std::string label) {
    CoefficientField cf(d, k, SigmaForm::custom);
    cf.eval_into_ = std::move(eval);
    cf.meta_ = meta;
    cf.params_["__label"] = {};
    (void)label;
    return cf;
}

Mat CoefficientField::eval(const Vec& x) const {
    Mat out(d_, k_);
    eval_into(x, out);
    return out;
}

void CoefficientField::eval_into(const Vec& x, Mat& out) const {
    if (x.size() != d_) throw InputError("sigma argument dimension mismatch");
    if (out.rows() != d_ || out.cols() != k_) out.resize(d_, k_);
    eval_into_(x, out);
}

double CoefficientField::scalar(double x) const {
    if (d_ != 1 || k_ != 1) throw InputError("scalar() requires d = k = 1");
    Vec v(1);
    v(0) = x;
    Mat m(1, 1);
    eval_into_(v, m);
    return m(0, 0);
}

double CoefficientField::check_linear_growth(int n_points) const {
    if (!meta_.linear_growth_const) return 0.0;
    double c = *meta_.linear_growth_const;
    double worst = 0.0;
    Mat m(d_, k_);
    for (int i = 0; i < n_points; ++i) {
        double mag = std::pow(10.0, -3.0 + 9.0 * i / std::max(n_points - 1, 1));
        for (int axis = 0; axis < d_; ++axis) {
            for (int sign : {+1, -1}) {
                Vec x = Vec::Zero(d_);
                x(axis) = sign * mag;
                eval_into_(x, m);
                worst = std::max(worst, m.norm() / (c * (1.0 + mag)));
            }
        }
    }
    return worst;
}

double CoefficientField::check_continuity(int n_points) const {
    double worst = 0.0;
    Mat m0(d_, k_), m1(d_, k_);
    for (int i = 0; i < n_points; ++i) {
        double mag = std::pow(10.0, -2.0 + 6.0 * i / std::max(n_points - 1, 1));
        for (int sign : {+1, -1}) {
            Vec x = Vec::Zero(d_);
            x(0) = sign * mag;
            eval_into_(x, m0);
            Vec xp = x;
            double h = 1e-7 * (1.0 + mag);
            xp(0) += h;
            eval_into_(xp, m1);
            worst = std::max(worst, (m1 - m0).norm() / (1.0 + m0.norm()));
        }
    }
    return worst;
}

}  // namespace feller
