#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpoint/sdpgen.hpp"

namespace kpoint {

// SDPA sparse export. The instance
//   min 1 + <C, F>  s.t.  <A_i, F> <= r_i,  F psd
// is written as the SDPA dual  max <F0, Y>  s.t.  <F_i, Y> = c_i,  Y psd
// with Y = F (+) diag(slack), F_i = A_i (+) e_i, c_i = r_i and F0 = -C (+) 0,
// so that bound = 1 - (SDPA optimum).
template <class T>
void export_sdpa(const SdpInstance<T>& instance, std::ostream& out, int digits = 50);

// Writes path and the metadata sidecar path + ".json".
template <class T>
void export_sdpa_file(const SdpInstance<T>& instance, const std::string& path, int digits = 50);

template <class T>
nlohmann::json sidecar_json(const SdpInstance<T>& instance);

// Parameters recorded in a sidecar.
DeltaParams params_from_sidecar(const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

struct SdpaEntry {
  int mat = 0;
  int block = 0;
  int i = 0;
  int j = 0;
  std::string value;
};

struct SdpaProblem {
  int m = 0;
  std::vector<int> block_struct;
  std::vector<std::string> c;
  std::vector<SdpaEntry> entries;
  std::vector<std::string> comments;
};

SdpaProblem parse_sdpa(std::istream& in);
SdpaProblem read_sdpa_file(const std::string& path);
void write_sdpa(const SdpaProblem& p, std::ostream& out);

// Canonical spelling of a numeric token at its own count of significant
// digits.
std::string canonical_number(const std::string& token);

struct SdpaValidation {
  bool ok = false;
  size_t lines = 0;
  size_t entries = 0;
  std::string message;
};

// Re-emits every line canonically and compares byte for byte, checking the
// header structure and index ranges on the way. Memory use is independent of
// the file size.
SdpaValidation validate_sdpa_stream(std::istream& in);
SdpaValidation validate_sdpa_file(const std::string& path);

// Common SDPA result layout. Diagonal blocks are expanded to diagonal
// matrices.
struct SdpaResult {
  std::string phase = "pdOPT";
  HighReal obj_primal;
  HighReal obj_dual;
  std::vector<HighReal> x_vec;
  std::vector<Matrix<HighReal>> x_mat;
  std::vector<Matrix<HighReal>> y_mat;
};

SdpaResult parse_sdpa_result(std::istream& in, const std::vector<int>& block_struct);
SdpaResult read_sdpa_result_file(const std::string& path, const std::vector<int>& block_struct);
void write_sdpa_result(const SdpaResult& r, const std::vector<int>& block_struct, std::ostream& out,
                       int digits = 50);

}  // namespace kpoint
