#include "bpdl/stats/martingale.hpp"

#include <cmath>
#include <limits>

#include "bpdl/errors.hpp"
#include "bpdl/stats/hypothesis.hpp"

namespace bpdl::stats {

namespace {
constexpr std::uint64_t kRebuildEvery = 1u << 16;
}  // namespace

MartingaleObserver::MartingaleObserver(const ModelParams& params, std::vector<TestFunction> fs)
    : params_(params), fs_(std::move(fs)), acc_(fs_.size()), per_(fs_.size()) {
  u0_ = params_.competition(Point{});
}

MartingaleObserver::Contribution MartingaleObserver::contribution(std::size_t k,
                                                                  const Point& x) const {
  const TestFunction& f = fs_[k];
  Contribution c{};
  c.f = f(x);
  c.f2 = c.f * c.f;
  const double g = params_.gamma(x), m = params_.mu(x), a = params_.alpha(x);
  if (g > 0.0 && !f.is_zero()) {
    c.gdf = g * f.smoothed(params_.dispersal, x, params_.domain, 1);
    c.gdf2 = g * f.smoothed(params_.dispersal, x, params_.domain, 2);
  }
  c.fmu = c.f * m;
  c.f2mu = c.f2 * m;
  c.wa = c.f * a;
  c.wa2 = c.f2 * a;
  return c;
}

void MartingaleObserver::pair_delta(const sim::Simulator& s, const Point& y,
                                    std::vector<double>& d1, std::vector<double>& d2) const {
  const std::size_t nf = fs_.size();
  std::vector<Contribution> cy(nf);
  bool any = false;
  for (std::size_t k = 0; k < nf; ++k) {
    cy[k] = contribution(k, y);
    any = any || !fs_[k].is_zero();
  }
  d1.assign(nf, 0.0);
  d2.assign(nf, 0.0);
  if (!any) return;
  s.for_each_neighbor(y, [&](std::size_t j, double u) {
    for (std::size_t k = 0; k < nf; ++k) {
      const Contribution& cj = per_[k][j];
      d1[k] += (cy[k].wa + cj.wa) * u;
      d2[k] += (cy[k].wa2 + cj.wa2) * u;
    }
  });
  for (std::size_t k = 0; k < nf; ++k) {
    d1[k] -= cy[k].wa * u0_;
    d2[k] -= cy[k].wa2 * u0_;
  }
}

void MartingaleObserver::rebuild(const sim::Simulator& s) {
  const auto& pop = s.population();
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    Acc& a = acc_[k];
    per_[k].clear();
    a.nu_f = a.birth = a.birth2 = a.death = a.death2 = a.comp = a.comp2 = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const Contribution c = contribution(k, pop[i]);
      per_[k].push_back(c);
      a.nu_f += c.f;
      a.birth += c.gdf;
      a.birth2 += c.gdf2;
      a.death += c.fmu;
      a.death2 += c.f2mu;
    }
  }
  for (std::size_t i = 0; i < pop.size(); ++i) {
    s.for_each_neighbor(pop[i], [&](std::size_t, double u) {
      for (std::size_t k = 0; k < fs_.size(); ++k) {
        acc_[k].comp += per_[k][i].wa * u;
        acc_[k].comp2 += per_[k][i].wa2 * u;
      }
    });
  }
  since_rebuild_ = 0;
}

void MartingaleObserver::on_start(const sim::Simulator& s) {
  rebuild(s);
  for (Acc& a : acc_) {
    a.nu_f0 = a.nu_f;
    a.compensator = 0.0;
    a.bracket = 0.0;
  }
}

void MartingaleObserver::advance(const sim::Simulator&, double t0, double t1) {
  const double dt = t1 - t0;
  for (Acc& a : acc_) {
    a.compensator += dt * (a.birth - a.death - a.comp);
    a.bracket += dt * (a.birth2 + a.death2 + a.comp2);
  }
}

void MartingaleObserver::before_event(const sim::Simulator& s, const sim::Event& e) {
  if (e.kind != sim::EventKind::natural_death && e.kind != sim::EventKind::competition_death) {
    return;
  }
  std::vector<double> d1, d2;
  pair_delta(s, e.x, d1, d2);
  const std::size_t i = e.index;
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    Acc& a = acc_[k];
    const Contribution c = per_[k][i];
    a.nu_f -= c.f;
    a.birth -= c.gdf;
    a.birth2 -= c.gdf2;
    a.death -= c.fmu;
    a.death2 -= c.f2mu;
    a.comp -= d1[k];
    a.comp2 -= d2[k];
    // mirror the population's swap-remove
    per_[k][i] = per_[k].back();
    per_[k].pop_back();
  }
}

void MartingaleObserver::after_event(const sim::Simulator& s, const sim::Event& e) {
  if (e.kind != sim::EventKind::birth) return;
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    const Contribution c = contribution(k, e.x);
    per_[k].push_back(c);
    Acc& a = acc_[k];
    a.nu_f += c.f;
    a.birth += c.gdf;
    a.birth2 += c.gdf2;
    a.death += c.fmu;
    a.death2 += c.f2mu;
  }
  std::vector<double> d1, d2;
  pair_delta(s, e.x, d1, d2);
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    acc_[k].comp += d1[k];
    acc_[k].comp2 += d2[k];
  }
  if (++since_rebuild_ >= kRebuildEvery) {
    // refresh the running sums to shed accumulated rounding
    const auto keep = acc_;
    rebuild(s);
    for (std::size_t k = 0; k < fs_.size(); ++k) {
      acc_[k].nu_f0 = keep[k].nu_f0;
      acc_[k].compensator = keep[k].compensator;
      acc_[k].bracket = keep[k].bracket;
    }
  }
}

double MartingaleObserver::martingale(std::size_t k) const {
  const Acc& a = acc_[k];
  return a.nu_f - a.nu_f0 - a.compensator;
}

void MartingaleObserver::on_snapshot(const sim::Simulator&, sim::Snapshot& snap) {
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    snap.observables.push_back(value(k));
    snap.observables.push_back(martingale(k));
    snap.observables.push_back(bracket(k));
  }
}

MartingaleSummary martingale_residual(const std::vector<sim::Trace>& traces, double t,
                                      std::size_t k, std::size_t first_slot) {
  if (traces.size() < 2) throw BadConfig("martingale residual needs at least two replicates");
  std::vector<double> m, b;
  const std::size_t slot = first_slot + MartingaleObserver::kSlots * k;
  for (const auto& tr : traces) {
    const sim::Snapshot& s = tr.at(t);
    if (s.observables.size() < slot + MartingaleObserver::kSlots) {
      throw NoSnapshot("snapshot at t = " + std::to_string(t) + " has no martingale record");
    }
    m.push_back(s.observables[slot + 1]);
    b.push_back(s.observables[slot + 2]);
  }
  const Summary sm = summarize(m);
  const Summary sb = summarize(b);
  MartingaleSummary out;
  out.t = t;
  out.mean = sm.mean;
  out.stderr_ = sm.stderr_;
  out.variance = sm.variance;
  out.mean_bracket = sb.mean;
  out.ratio = sb.mean > 0.0 ? sm.variance / sb.mean : std::numeric_limits<double>::quiet_NaN();
  out.n_replicates = traces.size();
  return out;
}

}  // namespace bpdl::stats
