#include "kpoint/sdpa.hpp"

#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <regex>
#include <sstream>

namespace kpoint {

namespace {

std::string value_string(double v, int digits) { return format_decimal(v, std::min(digits, 17)); }
std::string value_string(const HighReal& v, int digits) { return format_decimal(v, digits); }

template <class T>
void write_block_entries(std::ostream& out, int mat, int block, const Matrix<T>& a, int digits, bool negate) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i; j < a.cols(); ++j) {
      const T& v = a(i, j);
      if (v == 0) continue;
      out << mat << ' ' << block << ' ' << i + 1 << ' ' << j + 1 << ' '
          << value_string(negate ? T(-v) : v, digits) << '\n';
    }
}

std::vector<std::string> split_tokens(std::string line) {
  for (char& ch : line)
    if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw ParseError(std::string("bad integer for ") + what + ": " + tok);
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseError(std::string("bad integer for ") + what + ": " + tok);
  } catch (const std::out_of_range&) {
    throw ParseError(std::string("integer out of range for ") + what + ": " + tok);
  }
}

bool is_comment(const std::string& line) {
  return !line.empty() && (line[0] == '"' || line[0] == '*');
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

// Reads the next meaningful line; comments are appended to `comments` when
// given.
bool next_line(std::istream& in, std::string& line, std::vector<std::string>* comments) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment(line)) {
      if (comments) comments->push_back(line);
      continue;
    }
    if (blank(line)) continue;
    return true;
  }
  return false;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += v[i];
  }
  return s;
}

}  // namespace

template <class T>
void export_sdpa(const SdpInstance<T>& inst, std::ostream& out, int digits) {
  const auto& p = inst.params;
  const int m = static_cast<int>(inst.constraints.size());
  const int nb = static_cast<int>(inst.blocks.size());
  out << "\"kpoint instance D=" << p.D.to_string() << " n=" << p.n << " k=" << p.k << " d=" << p.d
      << " precision=" << inst.precision << '\n';
  out << "\"bound = 1 - (optimal value); block " << nb + 1 << " holds the inequality slacks\n";
  out << m << '\n' << nb + 1 << '\n';
  for (const BlockSpec& b : inst.blocks) out << b.dim << ' ';
  out << -m << '\n';
  for (int i = 0; i < m; ++i) {
    if (i) out << ' ';
    out << value_string(from_rational<T>(inst.constraints[static_cast<size_t>(i)].rhs), digits);
  }
  out << '\n';
  for (const auto& [b, mat] : inst.objective) write_block_entries(out, 0, b + 1, mat, digits, true);
  for (int i = 0; i < m; ++i) {
    for (const auto& [b, mat] : inst.constraints[static_cast<size_t>(i)].coefficients)
      write_block_entries(out, i + 1, b + 1, mat, digits, false);
    out << i + 1 << ' ' << nb + 1 << ' ' << i + 1 << ' ' << i + 1 << ' ' << value_string(T(1), digits) << '\n';
  }
  if (!out) throw IoError("writing SDPA output failed");
}

template <class T>
nlohmann::json sidecar_json(const SdpInstance<T>& inst) {
  nlohmann::json j;
  std::vector<std::string> D;
  for (const Rational& q : inst.params.D.values()) D.push_back(format_rational(q));
  j["D"] = D;
  j["n"] = inst.params.n;
  j["k"] = inst.params.k;
  j["d"] = inst.params.d;
  j["precision"] = inst.precision;
  j["catalog_hash"] = inst.catalog->hash();
  j["bound_mapping"] = "bound = 1 - optimum";
  j["slack_block"] = inst.blocks.size() + 1;
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& row : inst.constraints)
    cons.push_back({{"label", row.label}, {"size", row.orbit_size}, {"rhs", format_rational(row.rhs)}});
  j["constraints"] = cons;
  nlohmann::json blocks = nlohmann::json::array();
  for (const BlockSpec& b : inst.blocks)
    blocks.push_back({{"rep", b.rep_label}, {"rep_size", b.rep_size}, {"rep_index", b.rep_index},
                      {"l", b.l}, {"dim", b.dim}});
  j["blocks"] = blocks;
  return j;
}

template <class T>
void export_sdpa_file(const SdpInstance<T>& inst, const std::string& path, int digits) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  export_sdpa(inst, out, digits);
  out.close();
  if (!out) throw IoError("writing " + path + " failed");
  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot open " + path + ".json");
  side << sidecar_json(inst).dump(2) << '\n';
  if (!side) throw IoError("writing " + path + ".json failed");
}

DeltaParams params_from_sidecar(const nlohmann::json& j) {
  try {
    std::vector<Rational> D;
    for (const auto& s : j.at("D")) D.push_back(parse_rational(s.get<std::string>()));
    DeltaParams p{InnerProductSet(D), j.at("n").get<int>(), j.at("k").get<int>(), j.at("d").get<int>()};
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sidecar: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

SdpaProblem parse_sdpa(std::istream& in) {
  SdpaProblem p;
  std::string line;
  if (!next_line(in, line, &p.comments)) throw ParseError("missing mDIM");
  auto t = split_tokens(line);
  if (t.empty()) throw ParseError("missing mDIM");
  p.m = parse_int(t[0], "mDIM");
  if (!next_line(in, line, &p.comments)) throw ParseError("missing nBLOCK");
  t = split_tokens(line);
  if (t.empty()) throw ParseError("missing nBLOCK");
  const int nb = parse_int(t[0], "nBLOCK");
  if (p.m < 0 || nb <= 0) throw ParseError("nonpositive dimensions");
  if (!next_line(in, line, &p.comments)) throw ParseError("missing block structure");
  t = split_tokens(line);
  if (static_cast<int>(t.size()) < nb) throw ParseError("short block structure");
  for (int b = 0; b < nb; ++b) {
    int s = parse_int(t[static_cast<size_t>(b)], "block size");
    if (s == 0) throw ParseError("zero block size");
    p.block_struct.push_back(s);
  }
  while (static_cast<int>(p.c.size()) < p.m) {
    if (!next_line(in, line, &p.comments)) throw ParseError("missing cost vector");
    for (auto& tok : split_tokens(line)) p.c.push_back(canonical_number(tok));
  }
  if (static_cast<int>(p.c.size()) != p.m) throw ParseError("cost vector length mismatch");
  while (next_line(in, line, &p.comments)) {
    t = split_tokens(line);
    if (t.size() != 5) throw ParseError("entry line needs five fields: " + line);
    SdpaEntry e{parse_int(t[0], "matno"), parse_int(t[1], "blkno"), parse_int(t[2], "i"),
                parse_int(t[3], "j"), canonical_number(t[4])};
    if (e.mat < 0 || e.mat > p.m) throw ParseError("matrix index out of range: " + line);
    if (e.block < 1 || e.block > nb) throw ParseError("block index out of range: " + line);
    const int size = std::abs(p.block_struct[static_cast<size_t>(e.block - 1)]);
    if (e.i < 1 || e.j < 1 || e.i > size || e.j > size) throw ParseError("entry index out of range: " + line);
    if (e.i > e.j) std::swap(e.i, e.j);
    if (p.block_struct[static_cast<size_t>(e.block - 1)] < 0 && e.i != e.j)
      throw ParseError("off-diagonal entry in a diagonal block: " + line);
    p.entries.push_back(std::move(e));
  }
  return p;
}

SdpaProblem read_sdpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_sdpa(in);
}

void write_sdpa(const SdpaProblem& p, std::ostream& out) {
  for (const auto& c : p.comments) out << c << '\n';
  out << p.m << '\n' << p.block_struct.size() << '\n';
  for (size_t b = 0; b < p.block_struct.size(); ++b) out << p.block_struct[b] << (b + 1 < p.block_struct.size() ? " " : "");
  out << '\n' << join(p.c) << '\n';
  for (const auto& e : p.entries) out << e.mat << ' ' << e.block << ' ' << e.i << ' ' << e.j << ' ' << e.value << '\n';
}

std::string canonical_number(const std::string& token) {
  // [+-] digits [. digits] [(e|E) [+-] digits]
  size_t i = 0;
  const size_t n = token.size();
  auto digit = [&](size_t k) { return k < n && token[k] >= '0' && token[k] <= '9'; };
  if (i < n && (token[i] == '+' || token[i] == '-')) ++i;
  int digits = 0;
  bool leading = true, any = false;
  auto count = [&] {
    while (digit(i)) {
      any = true;
      if (token[i] != '0' || !leading) {
        leading = false;
        ++digits;
      }
      ++i;
    }
  };
  count();
  if (i < n && token[i] == '.') {
    ++i;
    count();
  }
  if (!any) throw ParseError("not a number: " + token);
  if (i < n && (token[i] == 'e' || token[i] == 'E')) {
    ++i;
    if (i < n && (token[i] == '+' || token[i] == '-')) ++i;
    if (!digit(i)) throw ParseError("not a number: " + token);
    while (digit(i)) ++i;
  }
  if (i != n) throw ParseError("not a number: " + token);
  if (leading) {
    // zero: keep the written digit count
    digits = 0;
    for (char ch : token) {
      if (ch == 'e' || ch == 'E') break;
      if (ch >= '0' && ch <= '9') ++digits;
    }
  }
  digits = std::max(digits, 1);
  const unsigned bits = static_cast<unsigned>(digits * 4 + 64);
  return format_decimal(parse_high(token, bits), digits);
}

SdpaValidation validate_sdpa_stream(std::istream& in) {
  SdpaValidation v;
  std::string line;
  int stage = 0, m = 0, nb = 0;
  size_t costs = 0;
  std::vector<int> sizes;
  auto fail = [&](const std::string& msg) {
    v.ok = false;
    v.message = "line " + std::to_string(v.lines) + ": " + msg;
    return v;
  };
  try {
    while (std::getline(in, line)) {
      ++v.lines;
      std::string canon;
      if (is_comment(line)) {
        continue;
      } else if (stage == 0) {
        m = parse_int(line, "mDIM");
        canon = std::to_string(m);
        stage = 1;
      } else if (stage == 1) {
        nb = parse_int(line, "nBLOCK");
        canon = std::to_string(nb);
        stage = 2;
      } else if (stage == 2) {
        auto t = split_tokens(line);
        if (static_cast<int>(t.size()) != nb) return fail("block structure length");
        std::vector<std::string> parts;
        for (auto& tok : t) {
          sizes.push_back(parse_int(tok, "block size"));
          if (sizes.back() == 0) return fail("zero block size");
          parts.push_back(std::to_string(sizes.back()));
        }
        canon = join(parts);
        stage = 3;
      } else if (stage == 3) {
        std::vector<std::string> parts;
        for (auto& tok : split_tokens(line)) parts.push_back(canonical_number(tok));
        costs += parts.size();
        canon = join(parts);
        if (costs > static_cast<size_t>(m)) return fail("cost vector too long");
        if (costs == static_cast<size_t>(m)) stage = 4;
      } else {
        auto t = split_tokens(line);
        if (t.size() != 5) return fail("entry needs five fields");
        int mat = parse_int(t[0], "matno"), blk = parse_int(t[1], "blkno");
        int i = parse_int(t[2], "i"), j = parse_int(t[3], "j");
        if (mat < 0 || mat > m) return fail("matrix index out of range");
        if (blk < 1 || blk > nb) return fail("block index out of range");
        int size = sizes[static_cast<size_t>(blk - 1)];
        if (i < 1 || j < i || j > std::abs(size)) return fail("entry index out of range");
        if (size < 0 && i != j) return fail("off-diagonal entry in diagonal block");
        canon = std::to_string(mat) + ' ' + std::to_string(blk) + ' ' + std::to_string(i) + ' ' +
                std::to_string(j) + ' ' + canonical_number(t[4]);
        ++v.entries;
      }
      if (canon != line) return fail("not canonical: '" + line + "' vs '" + canon + "'");
    }
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (stage < 4 && !(stage == 3 && m == 0)) return fail("truncated header");
  v.ok = true;
  v.message = "ok";
  return v;
}

SdpaValidation validate_sdpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return validate_sdpa_stream(in);
}

namespace {

// Nested brace lists of numeric tokens.
struct Node {
  std::string number;
  std::vector<Node> items;
  bool is_list = false;
};

class BraceParser {
 public:
  explicit BraceParser(const std::string& s, size_t pos) : s_(s), pos_(pos) {}

  Node parse() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of result file");
    if (s_[pos_] == '{') {
      ++pos_;
      Node n;
      n.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unterminated brace in result file");
        if (s_[pos_] == '}') {
          ++pos_;
          return n;
        }
        n.items.push_back(parse());
      }
    }
    size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ',' &&
           s_[pos_] != '{' && s_[pos_] != '}')
      ++pos_;
    if (start == pos_) throw ParseError("malformed result file");
    Node n;
    n.number = s_.substr(start, pos_ - start);
    return n;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ',')) ++pos_;
  }
  const std::string& s_;
  size_t pos_;
};

HighReal number_of(const Node& n) {
  if (n.is_list) throw ParseError("expected a number in result file");
  return parse_high(n.number, PrecisionScope::current_bits());
}

size_t find_key(const std::string& text, const std::string& key) {
  std::regex re(key + R"(\s*=)");
  std::smatch mt;
  if (!std::regex_search(text, mt, re)) throw ParseError("result file lacks " + key);
  return static_cast<size_t>(mt.position(0) + mt.length(0));
}

std::vector<Matrix<HighReal>> parse_blocks(const std::string& text, const std::string& key,
                                           const std::vector<int>& block_struct) {
  Node all = BraceParser(text, find_key(text, key)).parse();
  if (!all.is_list || all.items.size() != block_struct.size())
    throw ParseError(key + " has the wrong number of blocks");
  std::vector<Matrix<HighReal>> out;
  for (size_t b = 0; b < block_struct.size(); ++b) {
    const Node& node = all.items[b];
    const int s = block_struct[b];
    const Eigen::Index n = std::abs(s);
    Matrix<HighReal> mat = Matrix<HighReal>::Zero(n, n);
    if (!node.is_list || static_cast<Eigen::Index>(node.items.size()) != n)
      throw ParseError(key + " block " + std::to_string(b + 1) + " has the wrong size");
    if (s < 0) {
      for (Eigen::Index i = 0; i < n; ++i) mat(i, i) = number_of(node.items[static_cast<size_t>(i)]);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Node& row = node.items[static_cast<size_t>(i)];
        if (!row.is_list || static_cast<Eigen::Index>(row.items.size()) != n)
          throw ParseError(key + " row has the wrong size");
        for (Eigen::Index j = 0; j < n; ++j) mat(i, j) = number_of(row.items[static_cast<size_t>(j)]);
      }
    }
    out.push_back(std::move(mat));
  }
  return out;
}

}  // namespace

SdpaResult parse_sdpa_result(std::istream& in, const std::vector<int>& block_struct) {
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  SdpaResult r;
  std::smatch mt;
  if (std::regex_search(text, mt, std::regex(R"(phase\.value\s*=\s*(\w+))"))) r.phase = mt[1];
  auto scalar = [&](const std::string& key) {
    std::smatch m2;
    if (!std::regex_search(text, m2, std::regex(key + R"(\s*=\s*(\S+))")))
      throw ParseError("result file lacks " + key);
    return parse_high(m2[1], PrecisionScope::current_bits());
  };
  r.obj_primal = scalar("objValPrimal");
  r.obj_dual = scalar("objValDual");
  Node xv = BraceParser(text, find_key(text, "xVec")).parse();
  if (!xv.is_list) throw ParseError("xVec is not a list");
  for (const Node& n : xv.items) r.x_vec.push_back(number_of(n));
  r.x_mat = parse_blocks(text, "xMat", block_struct);
  r.y_mat = parse_blocks(text, "yMat", block_struct);
  return r;
}

SdpaResult read_sdpa_result_file(const std::string& path, const std::vector<int>& block_struct) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_sdpa_result(in, block_struct);
}

void write_sdpa_result(const SdpaResult& r, const std::vector<int>& block_struct, std::ostream& out,
                       int digits) {
  auto num = [&](const HighReal& v) { return format_decimal(v, digits); };
  out << "phase.value = " << r.phase << '\n';
  out << "objValPrimal = " << num(r.obj_primal) << '\n';
  out << "objValDual   = " << num(r.obj_dual) << '\n';
  out << "xVec = \n{";
  for (size_t i = 0; i < r.x_vec.size(); ++i) out << (i ? "," : "") << num(r.x_vec[i]);
  out << "}\n";
  auto blocks = [&](const char* key, const std::vector<Matrix<HighReal>>& mats) {
    if (mats.size() != block_struct.size()) throw DimensionMismatch("result block count");
    out << key << " = \n{\n";
    for (size_t b = 0; b < mats.size(); ++b) {
      const auto& m = mats[b];
      if (block_struct[b] < 0) {
        out << "{";
        for (Eigen::Index i = 0; i < m.rows(); ++i) out << (i ? "," : "") << num(m(i, i));
        out << "}\n";
      } else {
        out << "{";
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          out << (i ? "," : "") << "{";
          for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << num(m(i, j));
          out << "}";
        }
        out << "}\n";
      }
    }
    out << "}\n";
  };
  blocks("xMat", r.x_mat);
  blocks("yMat", r.y_mat);
  if (!out) throw IoError("writing result failed");
}

template void export_sdpa<double>(const SdpInstance<double>&, std::ostream&, int);
template void export_sdpa<HighReal>(const SdpInstance<HighReal>&, std::ostream&, int);
template void export_sdpa_file<double>(const SdpInstance<double>&, const std::string&, int);
template void export_sdpa_file<HighReal>(const SdpInstance<HighReal>&, const std::string&, int);
template nlohmann::json sidecar_json<double>(const SdpInstance<double>&);
template nlohmann::json sidecar_json<HighReal>(const SdpInstance<HighReal>&);

}  // namespace kpoint
