#include "steinpairs/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace steinpairs {

namespace {

double sqrt_two_pi() { return std::sqrt(2.0 * std::numbers::pi); }

void put(BoundReport& r, const ProvenanceMap& prov, const std::string& name, double value,
         const char* default_prov = "user") {
    auto it = prov.find(name);
    r.inputs[name] = BoundInput{value, it == prov.end() ? default_prov : it->second};
}

void require_nonneg(double v, const char* name) {
    if (!(v >= 0.0)) {
        std::ostringstream msg;
        msg << name << " must be nonnegative, got " << v;
        throw std::invalid_argument(msg.str());
    }
}

void require_pos(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << name << " must be positive, got " << v;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

BoundReport bound_discrete(double sigma, double m1, double m2, double lambda, double e_norm,
                           double third_moment, const ProvenanceMap& prov) {
    require_pos(sigma, "sigma");
    require_pos(lambda, "lambda");
    require_nonneg(m1, "m1");
    require_nonneg(m2, "m2");
    require_nonneg(e_norm, "e_norm");
    require_nonneg(third_moment, "third_moment");
    BoundReport r;
    r.theorem = "discrete";
    put(r, prov, "sigma", sigma);
    put(r, prov, "m1", m1);
    put(r, prov, "m2", m2);
    put(r, prov, "lambda", lambda);
    put(r, prov, "e_norm", e_norm);
    put(r, prov, "third_moment", third_moment);
    r.value = (m1 / sigma) * e_norm + (sqrt_two_pi() / (24.0 * sigma)) * (m2 / lambda) * third_moment;
    r.formula_text =
        "(M1/sigma)*E||E||_HS + (sqrt(2*pi)/(24*sigma))*(M2/lambda)*E|X'-X|^3";
    return r;
}

BoundReport bound_cont(double sigma, double f_norm, const ProvenanceMap& prov) {
    require_pos(sigma, "sigma");
    require_nonneg(f_norm, "f_norm");
    BoundReport r;
    r.theorem = "cont";
    put(r, prov, "sigma", sigma);
    put(r, prov, "f_norm", f_norm);
    r.value = f_norm / sigma;
    r.formula_text = "E||F||_HS / sigma";
    return r;
}

BoundReport bound_complex(double gamma_norm, double lambda_norm, const ProvenanceMap& prov) {
    require_nonneg(gamma_norm, "gamma_norm");
    require_nonneg(lambda_norm, "lambda_norm");
    BoundReport r;
    r.theorem = "complex";
    put(r, prov, "gamma_norm", gamma_norm);
    put(r, prov, "lambda_norm", lambda_norm);
    r.value = gamma_norm + lambda_norm;
    r.formula_text = "E||Gamma||_HS + E||Lambda||_HS";
    return r;
}

BoundReport bound_basic(long n, long k, double m1, double m2, double fourth_moment,
                        double third_moment, const ProvenanceMap& prov) {
    if (n < 1) throw std::invalid_argument("bound_basic: n must be >= 1");
    require_nonneg(m1, "m1");
    require_nonneg(m2, "m2");
    require_nonneg(third_moment, "third_moment");
    if (fourth_moment < static_cast<double>(k)) {
        std::ostringstream msg;
        msg << "bound_basic: inconsistent moments, E|Y|^4 = " << fourth_moment << " < k = " << k;
        throw std::invalid_argument(msg.str());
    }
    BoundReport r;
    r.theorem = "basic";
    put(r, prov, "n", static_cast<double>(n));
    put(r, prov, "k", static_cast<double>(k));
    put(r, prov, "m1", m1);
    put(r, prov, "m2", m2);
    put(r, prov, "fourth_moment", fourth_moment);
    put(r, prov, "third_moment", third_moment);
    const double root_n = std::sqrt(static_cast<double>(n));
    r.value = (m1 / (2.0 * root_n)) * std::sqrt(fourth_moment - static_cast<double>(k)) +
              (sqrt_two_pi() / (3.0 * root_n)) * m2 * third_moment;
    r.formula_text =
        "(M1/(2*sqrt(n)))*sqrt(E|Y|^4 - k) + (sqrt(2*pi)/(3*sqrt(n)))*M2*E|Y|^3";
    return r;
}

BoundReport bound_ksphere(long k, long n, double a, const ProvenanceMap& prov) {
    if (n < 2) throw std::invalid_argument("bound_ksphere: n must be >= 2");
    if (k < 1) throw std::invalid_argument("bound_ksphere: k must be >= 1");
    require_nonneg(a, "a");
    BoundReport r;
    r.theorem = "ksphere";
    put(r, prov, "k", static_cast<double>(k));
    put(r, prov, "n", static_cast<double>(n));
    put(r, prov, "a", a);
    r.value = static_cast<double>(k) * (std::sqrt(a) + 2.0) / static_cast<double>(n - 1);
    r.formula_text = "k*(sqrt(a) + 2)/(n - 1)";
    return r;
}

BoundReport bound_mix(long k, long n, const GramData& gram, const ProvenanceMap& prov) {
    if (n < 2) throw std::invalid_argument("bound_mix: n must be >= 2");
    if (gram.k() != k) throw std::invalid_argument("bound_mix: gram size does not match k");
    for (int i = 0; i < gram.k(); ++i) {
        if (std::abs(gram.gram(i, i) - gram.scale) > 1e-8 * gram.scale) {
            std::ostringstream msg;
            msg << "bound_mix: gram diagonal entry " << i << " is " << gram.gram(i, i)
                << ", expected the scale " << gram.scale;
            throw std::invalid_argument(msg.str());
        }
    }
    const Eigen::MatrixXd c = gram.gram / gram.scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
        throw std::invalid_argument("bound_mix: gram matrix is not positive semidefinite");
    const double c_op = op_norm(c);
    BoundReport r;
    r.theorem = "mix";
    put(r, prov, "k", static_cast<double>(k));
    put(r, prov, "n", static_cast<double>(n));
    put(r, prov, "c_op_norm", c_op, "analytic");
    r.value = static_cast<double>(k) * std::sqrt(2.0 * c_op) / static_cast<double>(n - 1);
    r.formula_text = "k*sqrt(2*||C||_op)/(n - 1)";
    return r;
}

BoundReport bound_uthm(long k, long n, const ProvenanceMap& prov) {
    if (n < 4) throw std::invalid_argument("bound_uthm: the constant 3 requires n >= 4");
    if (k < 1) throw std::invalid_argument("bound_uthm: k must be >= 1");
    BoundReport r;
    r.theorem = "uthm";
    put(r, prov, "k", static_cast<double>(k));
    put(r, prov, "n", static_cast<double>(n));
    r.value = 3.0 * static_cast<double>(k) / static_cast<double>(n);
    r.formula_text = "3*k/n";
    r.note = "the constant is asymptotically sqrt(2); 3 is valid for n >= 4";
    return r;
}

std::string bound_report_to_json(const BoundReport& r, int indent) {
    nlohmann::json j;
    j["theorem"] = r.theorem;
    j["value"] = r.value;
    j["formula_text"] = r.formula_text;
    nlohmann::json in(nlohmann::json::value_t::object);
    for (const auto& [name, input] : r.inputs) {
        in[name] = {{"value", input.value}, {"provenance", input.provenance}};
    }
    j["inputs"] = in;
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump(indent);
}

BoundReport bound_report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    BoundReport r;
    r.theorem = j.at("theorem").get<std::string>();
    r.value = j.at("value").get<double>();
    r.formula_text = j.at("formula_text").get<std::string>();
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
    for (const auto& [name, input] : j.at("inputs").items()) {
        r.inputs[name] = BoundInput{input.at("value").get<double>(),
                                    input.at("provenance").get<std::string>()};
    }
    return r;
}

}  // namespace steinpairs
