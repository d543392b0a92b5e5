#include "stablekit/io/freqresp_csv.hpp"
#include "stablekit/io/dsys_format.hpp"

#include <sstream>

namespace stablekit::io {

std::string write_freqresp_csv(const std::vector<double>& omegas, const std::vector<ComplexMatrix<double>>& responses,
                               Eigen::Index outputs, Eigen::Index inputs) {
  require_dims(omegas.size() == responses.size(), "one response per frequency");
  std::ostringstream os;
  os << "omega";
  for (Eigen::Index j = 0; j < inputs; ++j)
    for (Eigen::Index i = 0; i < outputs; ++i)
      os << ",re_G_" << i + 1 << '_' << j + 1 << ",im_G_" << i + 1 << '_' << j + 1;
  os << '\n';
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const auto& g = responses[k];
    require_dims(g.rows() == outputs && g.cols() == inputs, "response shape");
    os << format_double(omegas[k]);
    for (Eigen::Index j = 0; j < inputs; ++j)
      for (Eigen::Index i = 0; i < outputs; ++i)
        os << ',' << format_double(g(i, j).real()) << ',' << format_double(g(i, j).imag());
    os << '\n';
  }
  return os.str();
}

}  // namespace stablekit::io
