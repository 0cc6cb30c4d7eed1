#include "gridrisk/rng.hpp"

#include "gridrisk/distributions.hpp"

namespace gridrisk {

double Rng::next_std_normal() { return dist::std_normal_ppf(next_open01()); }

}  // namespace gridrisk
