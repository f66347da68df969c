#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nsq/disc_solver.hpp"
#include "nsq/dnls.hpp"
#include "nsq/symplectic.hpp"

namespace nsq {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "1.0.0";

json to_json(cplx z);  // [re, im]
cplx complex_from_json(const json& j);

json to_json(const ComplexSeq& x);  // {"offset", "entries": [[re, im], …]}
ComplexSeq seq_from_json(const json& j);

json matrix_to_json(const CMat& m);  // {"rows", "cols", "data": row-major [[re, im], …]}
CMat matrix_from_json(const json& j);
json real_matrix_to_json(const RMat& m);

json to_json(const RealLinearOp& f);  // {"P", "Q"}
RealLinearOp real_op_from_json(const json& j);

json to_json(const GridField& f);
json to_json(const BoundaryTrace& t);
json to_json(const DiscSolution& s);
json to_json(const VerifyReport& r);
json to_json(const JacobianReport& r);

// 17 significant digits, so values round-trip.
std::string format_double(double x);

// node,r,theta,c0_re,c0_im,…
void write_csv(std::ostream& os, const GridField& f);
// k,theta,arc,c0_re,c0_im,… over the columns of every trace in turn.
void write_csv(std::ostream& os, const std::vector<const BoundaryTrace*>& traces,
               const std::vector<std::string>& names);

// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace nsq
