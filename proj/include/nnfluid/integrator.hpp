#pragma once

// Time stepping and run driver.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nnfluid/solver.hpp"

namespace nnfluid {

enum class StopReason { Completed, NumericalBreakdown, DomainExhausted, StepLimit };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::NumericalBreakdown: return "numerical-breakdown";
    case StopReason::DomainExhausted: return "domain-exhausted";
    case StopReason::StepLimit: return "step-limit";
  }
  return "";
}

struct TimeSeries {
  std::vector<double> times;
  std::vector<EnergyBreakdown> breakdowns;
  std::vector<double> support_radius;
  std::vector<long> clamps;  // cumulative floor-clamp events at each record
  std::vector<double> div_h;  // relative divergence of H, 0 without a field
  std::vector<std::string> violations;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

struct RunResult {
  TimeSeries series;
  std::vector<FluidState> snapshots;
  StopReason stop = StopReason::Completed;
  double stop_time = 0.0;
  long steps = 0;
  long clamps = 0;
  std::string message;
};

/// Advances conserved variables with the explicit midpoint rule.
class Stepper {
 public:
  explicit Stepper(const SimConfig& config)
      : config_(config),
        floor_(config.floor_value()),
        rhs_(config.grid, config.model, config.params.eta, config.hyperdiffusion) {
    if (config.mhd()) projector_.emplace(config.grid);
  }

  long clamps() const { return clamps_; }

  /// One RK2 step of size dt; density is clamped at the floor after each stage and
  /// the magnetic field is projected onto discretely divergence-free fields.
  void step(ConservedState& s, double dt) {
    ConservedState half = s;
    FluidRhs k1 = evaluate(s);
    axpy(half, s, 0.5 * dt, k1);
    clamp(half);
    FluidRhs k2 = evaluate(half);
    ConservedState next = s;
    axpy(next, s, dt, k2);
    clamp(next);
    if (next.H && projector_) projector_->project(*next.H);
    s = std::move(next);
  }

  FluidRhs evaluate(const ConservedState& s) {
    if (config_.freeze_velocity) {
      FluidRhs r{ScalarField(s.rho.grid()), VectorField(s.rho.grid()), std::nullopt};
      if (s.H) r.dH = rhs_.induction(*s.H, {});
      return r;
    }
    return rhs_(s);
  }

 private:
  static void axpy(ConservedState& out, const ConservedState& base, double a, const FluidRhs& k) {
    const std::size_t N = base.rho.size();
    for (std::size_t i = 0; i < N; ++i) out.rho[i] = base.rho[i] + a * k.drho[i];
    for (int c = 0; c < base.mom.components(); ++c)
      for (std::size_t i = 0; i < N; ++i)
        out.mom.comp(c)[i] = base.mom.comp(c)[i] + a * k.dmom.comp(c)[i];
    if (base.H && k.dH)
      for (int c = 0; c < base.H->components(); ++c)
        for (std::size_t i = 0; i < N; ++i)
          out.H->comp(c)[i] = base.H->comp(c)[i] + a * k.dH->comp(c)[i];
  }

  void clamp(ConservedState& s) {
    for (double& r : s.rho.values())
      if (r < floor_) {
        r = floor_;
        ++clamps_;
      }
  }

  SimConfig config_;
  double floor_;
  RhsEvaluator rhs_;
  std::optional<DivergenceProjector> projector_;
  long clamps_ = 0;
};

/// One time step of size dt (or the stable step when dt is not given).
inline FluidState step(const FluidState& state, const SimConfig& config,
                       std::optional<double> dt = {}) {
  Stepper stepper(config);
  ConservedState c = to_conserved(state);
  const double h = dt.value_or(stable_dt(state, config.model, config.params.eta, config.cfl,
                                         config.floor_value()));
  stepper.step(c, h);
  return to_primitive(c, state.time + h);
}

inline bool all_finite(const ConservedState& s) {
  if (!s.rho.all_finite() || !s.mom.all_finite()) return false;
  return !s.H || s.H->all_finite();
}

/// Runs from the configured initial data to t_end, recording every output_every steps.
/// Stops early on non-finite values or when the support leaves margin * L.
inline RunResult run(const SimConfig& config, std::optional<FluidState> initial = {}) {
  config.validate();
  RunResult result;
  const double floor = config.floor_value();
  FluidState state = initial ? *initial : initial_data(config.initial, config.grid, floor);
  ConservedState cons = to_conserved(state);
  Stepper stepper(config);
  const double limit = config.localized() ? config.support_margin * config.grid.half_width()
                                         : std::numeric_limits<double>::infinity();
  const double baseline = std::max(floor, config.initial.rho_ambient);

  auto record = [&](const FluidState& s) {
    TimeSeries& ts = result.series;
    ts.times.push_back(s.time);
    ts.breakdowns.push_back(functionals(s, config.params));
    const double radius = support_radius(s, config.support_threshold, baseline);
    ts.support_radius.push_back(radius);
    ts.clamps.push_back(stepper.clamps());
    ts.div_h.push_back(s.H ? relative_divergence(*s.H) : 0.0);
    if (stepper.clamps() > 0 && ts.violations.empty())
      ts.violations.push_back("conservation not guaranteed: density floor clamped before t = " +
                              std::to_string(s.time));
    return radius;
  };

  double t = state.time;
  if (record(state) > limit) {
    result.stop = StopReason::DomainExhausted;
    result.stop_time = t;
    result.message = "domain exhausted at t = " + std::to_string(t);
    return result;
  }
  if (config.snapshot_every > 0) result.snapshots.push_back(state);

  long steps = 0;
  while (t < config.t_end) {
    if (steps >= config.max_steps) {
      result.stop = StopReason::StepLimit;
      result.message = "step limit reached at t = " + std::to_string(t);
      break;
    }
    double dt = stable_dt(state, config.model, config.params.eta, config.cfl, floor);
    if (config.freeze_velocity && state.H && config.params.eta > 0.0)
      dt = std::min(dt, config.cfl * std::pow(config.grid.min_spacing(), 2) /
                            (2.0 * config.grid.dim() * config.params.eta));
    const bool last = t + dt >= config.t_end;
    if (last) dt = config.t_end - t;
    stepper.step(cons, dt);
    ++steps;
    t = last ? config.t_end : t + dt;
    if (!all_finite(cons)) {
      result.stop = StopReason::NumericalBreakdown;
      result.stop_time = t;
      result.message = "numerical breakdown at t = " + std::to_string(t);
      break;
    }
    state = to_primitive(cons, t);
    if (steps % config.output_every == 0 || last) {
      if (record(state) > limit) {
        result.stop = StopReason::DomainExhausted;
        result.stop_time = t;
        result.message = "domain exhausted at t = " + std::to_string(t);
        break;
      }
    }
    if (config.snapshot_every > 0 && steps % config.snapshot_every == 0)
      result.snapshots.push_back(state);
  }
  if (result.stop == StopReason::Completed) result.stop_time = t;
  result.steps = steps;
  result.clamps = stepper.clamps();
  return result;
}

}  // namespace nnfluid
