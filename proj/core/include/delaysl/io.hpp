#pragma once

// JSON and CSV forms of the library objects, and the text formats used on the
// command line: delays in units of pi ("0.35pi", "pi/3") and complex numbers
// ("3+4i" or [re, im]).

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "delaysl/discover.hpp"
#include "delaysl/spectrum.hpp"

namespace delaysl::io {

using json = nlohmann::json;

double parse_delay(std::string_view s);
/// a / pi in shortest round-trip form followed by "pi".
std::string format_delay(double a);

cplx parse_complex(std::string_view s);
std::string format_complex(cplx z);
/// Comma separated; entries may carry units of pi only for real lists.
std::vector<cplx> parse_complex_list(std::string_view s);
std::vector<double> parse_real_list(std::string_view s);

json to_json(cplx z);
/// Accepts a number, [re, im] or a "re+imi" string.
cplx complex_from_json(const json& j);
/// Accepts a number (radians) or a string such as "0.35pi".
double delay_from_json(const json& j);

json to_json(const RealFunction& f);
RealFunction function_from_json(const json& j);
json to_json(const KernelOperator& op);
KernelOperator operator_from_json(const json& j);
json to_json(const EigenPair& p);
EigenPair pair_from_json(const json& j);
json to_json(const PiecewisePotential& q);
PiecewisePotential potential_from_json(const json& j);

json to_json(const W21Report& r);
json to_json(const WFunction& w);
json to_json(const std::vector<CharFnSample>& samples);
json to_json(const SpectralReport& r);
json to_json(const InvarianceVerdict& v);
json to_json(const NegativeControlReport& r);
json to_json(const TheoremChainReport& r);
json to_json(const Candidate& c);
json to_json(const PolishResult& r);

/// Re lambda, Im lambda, Re Delta, Im Delta, normalization, method.
void write_charfn_csv(std::ostream& out, const std::vector<CharFnSample>& samples);
/// Re lambda, Im lambda, multiplicity, residual.
void write_eigenvalues_csv(std::ostream& out, const SpectralReport& r);
/// family, j, lambda, deviation.
void write_deviations_csv(std::ostream& out, const InvarianceVerdict& v);
/// eta, mean, residual, index, coefficients...
void write_candidates_csv(std::ostream& out, const std::vector<Candidate>& cs);
/// x, Re q, Im q on `n` points per segment.
void write_potential_csv(std::ostream& out, const PiecewisePotential& q, int n = 65);

/// Two-space indented JSON with a trailing newline.
std::string dump(const json& j);
json read_json_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace delaysl::io
