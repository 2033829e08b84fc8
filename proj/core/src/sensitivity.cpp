#include "sadapt/sensitivity.hpp"

#include "sadapt/alignment.hpp"
#include "sadapt/config.hpp"
#include "sadapt/dataset_io.hpp"
#include "sadapt/error.hpp"

#include <sstream>

namespace sadapt {

std::vector<std::size_t> default_sensitivity_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t s = 10; s <= 500; s += 10) sizes.push_back(s);
  return sizes;
}

std::vector<std::size_t> parse_sizes(std::string_view text) {
  auto to_size = [](std::string_view tok) {
    const long long v = parse_int(tok, "sizes");
    if (v < 0) throw Error(ErrorKind::kParse, "sizes must be non-negative");
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> sizes;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
      throw Error(ErrorKind::kParse, "size range must be start:stop:step, got '" + std::string(text) + "'");
    }
    const std::size_t start = to_size(text.substr(0, a));
    const std::size_t stop = to_size(text.substr(a + 1, b - a - 1));
    const std::size_t step = to_size(text.substr(b + 1));
    if (step == 0) throw Error(ErrorKind::kParse, "size step must be positive");
    for (std::size_t s = start; s <= stop; s += step) sizes.push_back(s);
  } else {
    for (const auto& tok : split_csv_line(std::string(text))) sizes.push_back(to_size(tok));
  }
  if (sizes.empty()) throw Error(ErrorKind::kParse, "empty size grid '" + std::string(text) + "'");
  return sizes;
}

std::vector<SensitivityRow> run_sensitivity(const Matrix& x, const std::vector<std::size_t>& sizes) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (sizes.empty()) throw Error(ErrorKind::kInvalidArgument, "empty size grid");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw Error(ErrorKind::kInvalidArgument, "sample sizes must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw Error(ErrorKind::kInvalidArgument, "sample sizes must be strictly ascending");
  }
  if (sizes.back() > n) {
    throw Error(ErrorKind::kInvalidArgument, "largest sample size " + std::to_string(sizes.back()) +
                                                 " exceeds the " + std::to_string(n) + " available rows");
  }
  std::vector<SensitivityRow> rows;
  rows.reserve(sizes.size() * static_cast<std::size_t>(x.cols()));
  for (std::size_t s : sizes) {
    const MomentStats m = fit_moments(x.topRows(static_cast<Eigen::Index>(s)));
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      rows.push_back({s, static_cast<std::size_t>(f), m.mean(f), m.std(f)});
    }
  }
  return rows;
}

std::vector<SensitivityRow> run_sensitivity(const StructureSpec& spec, const std::map<ClassId, std::size_t>& counts,
                                            const std::vector<std::size_t>& sizes, Seed seed) {
  return run_sensitivity(generate_domain(spec, counts, seed).features(), sizes);
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
  std::ostringstream out;
  out << "size,feature,mean,std\n";
  for (const auto& r : rows) {
    out << r.size << ",f" << r.feature << ',' << format_double(r.mean) << ',' << format_double(r.std) << '\n';
  }
  return out.str();
}

}  // namespace sadapt
