#include "rsode/series.hpp"

namespace rsode {

template class Series<double>;
template class Series<std::complex<double>>;

}  // namespace rsode
