#include "riglid/riglid.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "dn.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "linear.hpp"
#include "solver.hpp"

using namespace riglid;

struct riglid_config {
  RunConfig c;
};

struct riglid_result {
  ExperimentResult r;
};

struct riglid_solver {
  SpectralGrid g;
  std::unique_ptr<WWSolver> s;
};

namespace {

thread_local std::string g_last_error;

riglid_status fail(riglid_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

riglid_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Configuration: return RIGLID_ERR_CONFIG;
    case ErrorKind::Shape: return RIGLID_ERR_SHAPE;
    case ErrorKind::Precondition: return RIGLID_ERR_PRECONDITION;
    case ErrorKind::Solver: return RIGLID_ERR_SOLVER;
    case ErrorKind::Admissibility: return RIGLID_ERR_ADMISSIBILITY;
    case ErrorKind::Geometry: return RIGLID_ERR_GEOMETRY;
    case ErrorKind::Context: return RIGLID_ERR_CONTEXT;
    case ErrorKind::Quadrature: return RIGLID_ERR_QUADRATURE;
    case ErrorKind::Singularity: return RIGLID_ERR_SINGULARITY;
    case ErrorKind::Io: return RIGLID_ERR_IO;
  }
  return RIGLID_ERR_INTERNAL;
}

template <class F>
riglid_status guarded(F&& f) {
  try {
    f();
    return RIGLID_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(RIGLID_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RIGLID_ERR_INTERNAL, "unknown exception");
  }
}

riglid_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return needed ? RIGLID_OK : fail(RIGLID_ERR_ARGUMENT, "null buffer");
  if (len < s.size() + 1) return fail(RIGLID_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return RIGLID_OK;
}

#define REQUIRE(p)                                                     \
  do {                                                                 \
    if (!(p)) return fail(RIGLID_ERR_ARGUMENT, "null argument: " #p); \
  } while (0)

}  // namespace

extern "C" {

const char* riglid_version(void) {
  static const std::string v = code_version();
  return v.c_str();
}

const char* riglid_last_error(void) { return g_last_error.c_str(); }

int riglid_experiment_count(void) { return static_cast<int>(experiment_names().size()); }

const char* riglid_experiment_name(int index) {
  const auto& n = experiment_names();
  if (index < 0 || index >= static_cast<int>(n.size())) return nullptr;
  return n[index].c_str();
}

riglid_status riglid_config_new(const char* experiment, riglid_config** out) {
  REQUIRE(experiment);
  REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new riglid_config{defaults_for(experiment)}; });
}

riglid_status riglid_config_load(const char* path, const char* experiment_override, riglid_config** out) {
  REQUIRE(path);
  REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new riglid_config{load_config(path, experiment_override ? experiment_override : "")};
  });
}

riglid_status riglid_config_parse(const char* text, riglid_config** out) {
  REQUIRE(text);
  REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new riglid_config{parse_config_text(text)}; });
}

riglid_status riglid_config_set(riglid_config* c, const char* key, const char* value) {
  REQUIRE(c);
  REQUIRE(key);
  REQUIRE(value);
  return guarded([&] {
    if (std::strcmp(key, "experiment") == 0) {
      RunConfig d = defaults_for(value);
      d.seed = c->c.seed;
      d.out_dir = c->c.out_dir;
      c->c = d;
    } else {
      RunConfig tmp = c->c;
      set_key(tmp, key, value);
      c->c = tmp;
    }
  });
}

riglid_status riglid_config_get(const riglid_config* c, const char* key, char* buf, size_t len, size_t* needed) {
  REQUIRE(c);
  REQUIRE(key);
  std::string v;
  const riglid_status st = guarded([&] { v = get_key(c->c, key); });
  if (st != RIGLID_OK) return st;
  return copy_out(v, buf, len, needed);
}

riglid_status riglid_config_serialize(const riglid_config* c, char* buf, size_t len, size_t* needed) {
  REQUIRE(c);
  return copy_out(serialize_config(c->c), buf, len, needed);
}

riglid_status riglid_config_validate(const riglid_config* c) {
  REQUIRE(c);
  return guarded([&] { validate_config(c->c); });
}

void riglid_config_free(riglid_config* c) { delete c; }

riglid_status riglid_run(const riglid_config* c, const char* out_dir, int jobs, riglid_result** out) {
  REQUIRE(c);
  REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const std::string dir = out_dir ? out_dir : c->c.out_dir;
    *out = new riglid_result{run_experiment(c->c, dir, jobs)};
    if (!(*out)->r.error.empty()) g_last_error = (*out)->r.error;
  });
}

int riglid_result_exit_code(const riglid_result* r) { return r ? r->r.exit_code : RIGLID_EXIT_RUNTIME; }
int riglid_result_complete(const riglid_result* r) { return r && r->r.complete ? 1 : 0; }
const char* riglid_result_error(const riglid_result* r) { return r ? r->r.error.c_str() : ""; }
double riglid_result_wall_time(const riglid_result* r) { return r ? r->r.wall_time : 0.0; }
int riglid_result_assertion_count(const riglid_result* r) {
  return r ? static_cast<int>(r->r.assertions.size()) : 0;
}

riglid_status riglid_result_assertion(const riglid_result* r, int index, const char** id, int* criterion,
                                      int* passed, double* measured, double* threshold, const char** detail) {
  REQUIRE(r);
  if (index < 0 || index >= static_cast<int>(r->r.assertions.size()))
    return fail(RIGLID_ERR_ARGUMENT, "assertion index out of range");
  const Assertion& a = r->r.assertions[index];
  if (id) *id = a.id.c_str();
  if (criterion) *criterion = a.criterion;
  if (passed) *passed = a.passed ? 1 : 0;
  if (measured) *measured = a.measured;
  if (threshold) *threshold = a.threshold;
  if (detail) *detail = a.detail.c_str();
  return RIGLID_OK;
}

int riglid_result_output_count(const riglid_result* r) { return r ? static_cast<int>(r->r.outputs.size()) : 0; }

const char* riglid_result_output(const riglid_result* r, int index) {
  if (!r || index < 0 || index >= static_cast<int>(r->r.outputs.size())) return nullptr;
  return r->r.outputs[index].c_str();
}

void riglid_result_free(riglid_result* r) { delete r; }

riglid_status riglid_linear_propagate(double L, int n, double mu, double eps, double t, const double* zeta,
                                      const double* psi, double* zeta_out, double* psi_out) {
  REQUIRE(zeta);
  REQUIRE(psi);
  REQUIRE(zeta_out);
  REQUIRE(psi_out);
  return guarded([&] {
    if (!(eps > 0)) throw PreconditionError("epsilon must be > 0");
    const SpectralGrid g(L, n);
    const SurfaceState s = propagate_linear({Vec(zeta, zeta + n), Vec(psi, psi + n)}, t, eps, mu, g);
    std::copy(s.zeta.begin(), s.zeta.end(), zeta_out);
    std::copy(s.psi.begin(), s.psi.end(), psi_out);
  });
}

riglid_status riglid_dn_apply(double L, int n, double mu, int nz, double eps, const char* mode, const double* zeta,
                              const double* psi, double* out) {
  REQUIRE(mode);
  REQUIRE(zeta);
  REQUIRE(psi);
  REQUIRE(out);
  return guarded([&] {
    const SpectralGrid g(L, n);
    const DNSolver s(g, mu, nz);
    const Vec G = dn_apply(s, Vec(zeta, zeta + n), Vec(psi, psi + n), eps, parse_dn_mode(mode));
    std::copy(G.begin(), G.end(), out);
  });
}

riglid_status riglid_null_check(double L, int n, double mu, int nz, uint64_t seed, double* residual) {
  REQUIRE(residual);
  return guarded([&] {
    double after = 0;
    rigid_lid_null_check(SpectralGrid(L, n), mu, nz, static_cast<unsigned>(seed), nullptr, &after);
    *residual = after;
  });
}

riglid_status riglid_solver_new(double L, int n, double eps, double mu, int nz, double dt, const char* mode,
                                riglid_solver** out) {
  REQUIRE(mode);
  REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    PhysicalParams p;
    p.epsilon = eps;
    p.mu = mu;
    SolverConfig c;
    c.dt = dt;
    c.n_z = nz;
    c.dn_mode = parse_dn_mode(mode);
    const SpectralGrid g(L, n);
    auto* s = new riglid_solver{g, nullptr};
    try {
      s->s = std::make_unique<WWSolver>(g, p, c);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
  });
}

riglid_status riglid_solver_step(const riglid_solver* s, const double* zeta, const double* psi, double dt,
                                 double* zeta_out, double* psi_out) {
  REQUIRE(s);
  REQUIRE(zeta);
  REQUIRE(psi);
  REQUIRE(zeta_out);
  REQUIRE(psi_out);
  return guarded([&] {
    const int n = s->g.size();
    const SurfaceState r = s->s->step({Vec(zeta, zeta + n), Vec(psi, psi + n)}, dt);
    std::copy(r.zeta.begin(), r.zeta.end(), zeta_out);
    std::copy(r.psi.begin(), r.psi.end(), psi_out);
  });
}

riglid_status riglid_solver_hamiltonian(const riglid_solver* s, const double* zeta, const double* psi,
                                        double* value) {
  REQUIRE(s);
  REQUIRE(zeta);
  REQUIRE(psi);
  REQUIRE(value);
  return guarded([&] {
    const int n = s->g.size();
    *value = s->s->hamiltonian_conserved({Vec(zeta, zeta + n), Vec(psi, psi + n)});
  });
}

void riglid_solver_free(riglid_solver* s) { delete s; }

}  // extern "C"
