#include "polystab/sdp.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "polystab/errors.h"
#include "polystab/matrix_io.h"

namespace polystab {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_size(n));
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      v(svec_index(n, i, j)) = i == j ? m(i, i) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
    }
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  if (v.size() != svec_size(n)) throw ShapeError("smat: wrong svec length");
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const double x = v(svec_index(n, i, j));
      if (i == j) {
        m(i, i) = x;
      } else {
        m(i, j) = m(j, i) = x / kSqrt2;
      }
    }
  }
  return m;
}

std::vector<int> SDPInstance::free_indices() const {
  std::vector<bool> covered(num_vars, false);
  for (const auto& blk : blocks) {
    for (int k = 0; k < svec_size(blk.size); ++k) covered[blk.offset + k] = true;
  }
  std::vector<int> out;
  for (int i = 0; i < num_vars; ++i) {
    if (!covered[i]) out.push_back(i);
  }
  return out;
}

Eigen::MatrixXd SDPInstance::block_matrix(
    int k, const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const auto& blk = blocks.at(k);
  return smat(v.segment(blk.offset, svec_size(blk.size)), blk.size);
}

const VarSlice* SDPInstance::find_slice(const std::string& name) const {
  for (const auto& s : layout) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void SDPInstance::validate() const {
  if (A.cols() != num_vars || A.rows() != b.size()) {
    throw ShapeError("SDP equality system has inconsistent shape");
  }
  if (c.size() != num_vars) throw ShapeError("SDP objective has wrong length");
  std::vector<int> cover(num_vars, 0);
  for (const auto& blk : blocks) {
    if (blk.size < 1 || blk.offset < 0 || blk.offset + svec_size(blk.size) > num_vars) {
      throw ShapeError("SDP block '" + blk.name + "' out of range");
    }
    for (int k = 0; k < svec_size(blk.size); ++k) {
      if (cover[blk.offset + k]++) throw ShapeError("SDP blocks overlap");
    }
  }
  std::vector<int> layout_cover(num_vars, 0);
  for (const auto& s : layout) {
    for (int k = 0; k < s.length; ++k) {
      if (s.offset + k >= num_vars || layout_cover[s.offset + k]++) {
        throw ShapeError("SDP layout slices do not partition the variables");
      }
    }
  }
  for (int k = 0; k < num_vars; ++k) {
    if (!layout_cover[k]) throw ShapeError("SDP layout leaves a variable unnamed");
  }
}

std::string to_sdpa(const SDPInstance& inst) {
  const std::vector<int> free = inst.free_indices();
  const int nf = static_cast<int>(free.size());
  std::map<int, int> free_pos;
  for (int k = 0; k < nf; ++k) free_pos[free[k]] = k;

  // Variable index -> (block number, row, col, entry scale).
  struct Site {
    int block;
    int i;
    int j;
    double scale;
  };
  std::vector<Site> site(inst.num_vars);
  for (size_t bi = 0; bi < inst.blocks.size(); ++bi) {
    const auto& blk = inst.blocks[bi];
    for (int j = 0; j < blk.size; ++j) {
      for (int i = j; i < blk.size; ++i) {
        site[blk.offset + svec_index(blk.size, i, j)] = {
            static_cast<int>(bi) + 1, j + 1, i + 1, i == j ? 1.0 : 1.0 / kSqrt2};
      }
    }
  }
  const int lp_block = static_cast<int>(inst.blocks.size()) + 1;

  std::ostringstream os;
  os << "\"polystab SDP: " << inst.num_equalities() << " equalities, "
     << inst.blocks.size() << " PSD blocks, " << nf << " free variables\n";
  os << inst.num_equalities() << "\n";
  os << inst.blocks.size() + (nf > 0 ? 1 : 0) << "\n";
  for (const auto& blk : inst.blocks) os << blk.size << " ";
  if (nf > 0) os << -2 * nf;
  os << "\n";
  for (int i = 0; i < inst.num_equalities(); ++i) {
    os << format_double(inst.b(i)) << (i + 1 < inst.num_equalities() ? " " : "");
  }
  os << "\n";

  auto emit = [&](int matno, int var, double coef) {
    if (coef == 0.0) return;
    auto it = free_pos.find(var);
    if (it != free_pos.end()) {
      const int k = it->second;
      os << matno << " " << lp_block << " " << 2 * k + 1 << " " << 2 * k + 1 << " "
         << format_double(coef) << "\n";
      os << matno << " " << lp_block << " " << 2 * k + 2 << " " << 2 * k + 2 << " "
         << format_double(-coef) << "\n";
      return;
    }
    const Site& s = site[var];
    os << matno << " " << s.block << " " << s.i << " " << s.j << " "
       << format_double(coef * s.scale) << "\n";
  };
  for (int v = 0; v < inst.num_vars; ++v) {
    if (inst.c(v) != 0.0) emit(0, v, -inst.c(v));
  }
  for (int r = 0; r < inst.A.rows(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(inst.A, r); it; ++it) {
      emit(r + 1, static_cast<int>(it.col()), it.value());
    }
  }
  return os.str();
}

void write_sdpa(const SDPInstance& inst, const std::string& path) {
  write_text_file(path, to_sdpa(inst));
}

SDPInstance read_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sdpa(ss.str());
}

SDPInstance parse_sdpa(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  std::ostringstream body;
  while (std::getline(lines, line)) {
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
    for (char& ch : line) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    body << line << "\n";
  }
  std::istringstream in(body.str());
  int m = 0, nblocks = 0;
  if (!(in >> m >> nblocks) || m < 0 || nblocks < 1) {
    throw FormatError("SDPA: bad header");
  }
  std::vector<int> structure(nblocks);
  for (auto& s : structure) {
    if (!(in >> s) || s == 0) throw FormatError("SDPA: bad block structure");
  }
  Eigen::VectorXd cvec(m);
  for (int i = 0; i < m; ++i) {
    if (!(in >> cvec(i))) throw FormatError("SDPA: bad objective vector");
  }

  SDPInstance inst;
  // Per SDPA block: list of (offset, size) of our blocks.
  std::vector<std::vector<int>> sdpa_offsets(nblocks);
  int offset = 0;
  for (int bi = 0; bi < nblocks; ++bi) {
    const int s = structure[bi];
    if (s > 0) {
      inst.blocks.push_back({"block" + std::to_string(bi + 1), s, offset});
      inst.layout.push_back({"block" + std::to_string(bi + 1), offset, svec_size(s)});
      sdpa_offsets[bi].push_back(offset);
      offset += svec_size(s);
    } else {
      for (int k = 0; k < -s; ++k) {
        const std::string name = "block" + std::to_string(bi + 1) + "_" + std::to_string(k + 1);
        inst.blocks.push_back({name, 1, offset});
        inst.layout.push_back({name, offset, 1});
        sdpa_offsets[bi].push_back(offset);
        offset += 1;
      }
    }
  }
  inst.num_vars = offset;
  inst.c = Eigen::VectorXd::Zero(offset);
  inst.b = cvec;
  std::vector<Eigen::Triplet<double>> trips;
  int matno, blkno, i, j;
  double value;
  while (in >> matno >> blkno >> i >> j >> value) {
    if (matno < 0 || matno > m || blkno < 1 || blkno > nblocks) {
      throw FormatError("SDPA: entry index out of range");
    }
    const int s = structure[blkno - 1];
    int var;
    double coef;
    if (s > 0) {
      if (i < 1 || j < 1 || i > s || j > s) throw FormatError("SDPA: entry outside block");
      var = sdpa_offsets[blkno - 1][0] + svec_index(s, i - 1, j - 1);
      coef = i == j ? value : value * kSqrt2;
    } else {
      if (i != j || i < 1 || i > -s) throw FormatError("SDPA: off-diagonal LP entry");
      var = sdpa_offsets[blkno - 1][i - 1];
      coef = value;
    }
    if (matno == 0) {
      inst.c(var) -= coef;
    } else {
      trips.emplace_back(matno - 1, var, coef);
    }
  }
  if (!in.eof()) throw FormatError("SDPA: trailing garbage in entries");
  inst.A.resize(m, offset);
  inst.A.setFromTriplets(trips.begin(), trips.end());
  inst.rows.push_back({"sdpa", 0, m});
  inst.validate();
  return inst;
}

}  // namespace polystab
