#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>

#include "papevo/format.hpp"
#include "papevo/pap.hpp"

namespace papevo {

void write_trajectory(std::ostream& os, const Trajectory& f) {
  const GridSpec& s = f.space();
  const TimeGrid& g = f.grid();
  os << "PAPTRAJ " << s.dim() << ' ' << s.points_per_axis() << ' ' << fmt17(s.half_width()) << ' '
     << fmt17(g.t_min()) << ' ' << fmt17(g.t_max()) << ' ' << g.steps() << '\n';
  for (const auto& snap : f.snapshots()) {
    for (const auto& v : snap.values()) os << fmt17(v.real()) << ' ' << fmt17(v.imag()) << '\n';
  }
}

namespace {

double parse_double(const std::string& tok) {
  // Stream extraction under the classic locale keeps this locale independent.
  std::istringstream is(tok);
  is.imbue(std::locale::classic());
  double x = 0.0;
  is >> x;
  if (!is || !is.eof()) throw InvalidArgument("PAPTRAJ: bad number '" + tok + "'");
  return x;
}

}  // namespace

Trajectory read_trajectory(std::istream& is, LorentzExponents space_norm) {
  std::string magic;
  int d = 0, n = 0, steps = 0;
  std::string R_tok, tmin_tok, tmax_tok;
  if (!(is >> magic >> d >> n >> R_tok >> tmin_tok >> tmax_tok >> steps) || magic != "PAPTRAJ") {
    throw InvalidArgument("PAPTRAJ: malformed header");
  }
  const double R = parse_double(R_tok);
  const GridSpec space = (d == 1 && n == 1) ? GridSpec::scalar() : GridSpec(d, n, R);
  if (space.is_scalar() && R != space.half_width()) throw InvalidArgument("PAPTRAJ: bad scalar grid");
  const TimeGrid grid(parse_double(tmin_tok), parse_double(tmax_tok), steps);
  Trajectory f(grid, space, space_norm);
  std::string re, im;
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<cplx> values(space.size());
    for (auto& v : values) {
      if (!(is >> re >> im)) throw InvalidArgument("PAPTRAJ: truncated data");
      v = cplx(parse_double(re), parse_double(im));
    }
    f[i] = Field(space, std::move(values));
  }
  return f;
}

}  // namespace papevo
