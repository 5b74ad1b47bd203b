#pragma once

#include <map>
#include <string>

#include "steinpairs/matrix.hpp"

namespace steinpairs {

// Provenance of a bound input: closed form, simulation estimate, or caller.
struct BoundInput {
    double value = 0.0;
    std::string provenance = "user";
};

using ProvenanceMap = std::map<std::string, std::string>;

struct BoundReport {
    std::string theorem;  // discrete | cont | complex | basic | ksphere | mix | uthm
    std::map<std::string, BoundInput> inputs;
    double value = 0.0;
    std::string formula_text;
    std::string note;
};

std::string bound_report_to_json(const BoundReport& r, int indent = 2);
BoundReport bound_report_from_json(const std::string& text);

// Wasserstein error bounds. Each takes the named scalar inputs and an
// optional provenance override per input name (default "user").
BoundReport bound_discrete(double sigma, double m1, double m2, double lambda, double e_norm,
                           double third_moment, const ProvenanceMap& prov = {});
BoundReport bound_cont(double sigma, double f_norm, const ProvenanceMap& prov = {});
BoundReport bound_complex(double gamma_norm, double lambda_norm, const ProvenanceMap& prov = {});
BoundReport bound_basic(long n, long k, double m1, double m2, double fourth_moment,
                        double third_moment, const ProvenanceMap& prov = {});
BoundReport bound_ksphere(long k, long n, double a, const ProvenanceMap& prov = {});
BoundReport bound_mix(long k, long n, const GramData& gram, const ProvenanceMap& prov = {});
BoundReport bound_uthm(long k, long n, const ProvenanceMap& prov = {});

}  // namespace steinpairs
