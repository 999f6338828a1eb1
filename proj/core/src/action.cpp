#include "dualact/action.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dualact/errors.hpp"
#include "kahan.hpp"

namespace dualact {
namespace {

std::string node_label(const MultiTimeGrid& grid, std::size_t node) {
  std::ostringstream os;
  os << "node (";
  for (int a = 0; a < grid.dims(); ++a) {
    os << (a ? ", " : "") << grid.coordinate(node, a);
  }
  os << "), t = (";
  const std::vector<double> t = grid.time_at(node);
  for (int a = 0; a < grid.dims(); ++a) {
    os << (a ? ", " : "") << t[static_cast<std::size_t>(a)];
  }
  os << ")";
  return os.str();
}

Eigen::VectorXd node_time(const MultiTimeGrid& grid, std::size_t node) {
  Eigen::VectorXd t(grid.dims());
  for (int a = 0; a < grid.dims(); ++a) {
    t[a] = static_cast<double>(grid.coordinate(node, a)) * grid.spacing(a);
  }
  return t;
}

Eigen::VectorXd node_vector(const PeriodicField& field, std::size_t node) {
  const auto values = field.node(node);
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

void store_node(PeriodicField& field, std::size_t node, const Eigen::VectorXd& value) {
  auto out = field.node(node);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = value[static_cast<Eigen::Index>(k)];
  }
}

}  // namespace

void ActionProblem::validate() const {
  if (hamiltonian.p != grid.dims()) {
    throw std::invalid_argument("action problem: Hamiltonian p does not match grid dimensions");
  }
  if (hamiltonian.n < 1) {
    throw std::invalid_argument("action problem: Hamiltonian needs n >= 1");
  }
}

double eval_psi(const ActionProblem& prob, const PeriodicField& u) {
  prob.validate();
  const int n = prob.hamiltonian.n;
  if (u.components() != phase_components(n, prob.grid.dims())) {
    throw std::invalid_argument("eval_psi: field is not a phase field for this problem");
  }
  const PeriodicField bu = poly_derivative(u, n, prob.scheme);

  detail::KahanSum acc;
  const std::size_t nodes = prob.grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(prob.grid, node);
    const double bilinear = metric_inner(bu.node(node), u.node(node));
    acc.add(-0.5 * bilinear - prob.hamiltonian.value(t, node_vector(u, node)));
  }
  return acc.value() * prob.grid.cell_volume();
}

PeriodicField conjugate_sweep(const ActionProblem& prob, const PeriodicField& field,
                              const PeriodicField* guess, std::vector<double>* values) {
  prob.validate();
  const int n = prob.hamiltonian.n;
  const std::size_t nodes = prob.grid.node_count();
  PeriodicField out = PeriodicField::phase(prob.grid, n);
  if (values) {
    values->assign(nodes, 0.0);
  }

  auto conjugate_node = [&](std::size_t node, const Eigen::VectorXd* start) {
    const Eigen::VectorXd t = node_time(prob.grid, node);
    const Eigen::VectorXd target = node_vector(field, node);
    try {
      ConjugateResult res = conjugate(prob.hamiltonian, t, target, start, prob.newton);
      if (values) {
        (*values)[node] = res.value;
      }
      store_node(out, node, res.argmax);
    } catch (const ConvexityError& e) {
      throw ConvexityError(std::string(e.what()) + " at " + node_label(prob.grid, node),
                           e.time_point(), e.point());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at " + node_label(prob.grid, node),
                             e.best_residual(), e.iterations());
    }
  };

  if (prob.threads <= 1) {
    // Serial sweep: warm start each node from the previous argmax.
    Eigen::VectorXd carry;
    const Eigen::VectorXd* start = nullptr;
    for (std::size_t node = 0; node < nodes; ++node) {
      if (node == 0 && guess) {
        carry = node_vector(*guess, 0);
        start = &carry;
      }
      conjugate_node(node, start);
      carry = node_vector(out, node);
      start = &carry;
    }
    return out;
  }

  // Parallel sweep: order-independent starts (supplied guess or zero).
  const int workers = prob.threads;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};

  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      Eigen::VectorXd local;
      for (;;) {
        const std::size_t node = next.fetch_add(1);
        if (node >= nodes) {
          return;
        }
        try {
          const Eigen::VectorXd* start = nullptr;
          if (guess) {
            local = node_vector(*guess, node);
            start = &local;
          }
          conjugate_node(node, start);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
          next.store(nodes);
          return;
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
  return out;
}

PhiEvaluation eval_phi_full(const ActionProblem& prob, const PeriodicField& v,
                            const PeriodicField* w_guess) {
  prob.validate();
  const int n = prob.hamiltonian.n;
  if (v.components() != phase_components(n, prob.grid.dims())) {
    throw std::invalid_argument("eval_phi: field is not a phase field for this problem");
  }

  PhiEvaluation eval{
      0.0,
      PeriodicField::phase(prob.grid, n),
      poly_derivative(v, n, prob.scheme),
      PeriodicField::phase(prob.grid, n),
  };

  std::vector<double> conjugate_values;
  eval.w = conjugate_sweep(prob, eval.vstar, w_guess, &conjugate_values);

  detail::KahanSum acc;
  const std::size_t nodes = prob.grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    acc.add(0.5 * metric_inner(eval.vstar.node(node), v.node(node)) + conjugate_values[node]);
  }
  eval.value = acc.value() * prob.grid.cell_volume();

  // gradient = cellvol * B(v + w); mean-free by construction.
  PeriodicField shifted = v;
  axpy_in_place(1.0, eval.w, shifted);
  eval.gradient = poly_derivative(shifted, n, prob.scheme);
  scale_in_place(eval.gradient, prob.grid.cell_volume());
  return eval;
}

double eval_phi(const ActionProblem& prob, const PeriodicField& v) {
  prob.validate();
  const int n = prob.hamiltonian.n;
  if (v.components() != phase_components(n, prob.grid.dims())) {
    throw std::invalid_argument("eval_phi: field is not a phase field for this problem");
  }
  const PeriodicField vstar = poly_derivative(v, n, prob.scheme);
  std::vector<double> conjugate_values;
  conjugate_sweep(prob, vstar, nullptr, &conjugate_values);

  detail::KahanSum acc;
  const std::size_t nodes = prob.grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    acc.add(0.5 * metric_inner(vstar.node(node), v.node(node)) + conjugate_values[node]);
  }
  return acc.value() * prob.grid.cell_volume();
}

PeriodicField grad_phi(const ActionProblem& prob, const PeriodicField& v) {
  return eval_phi_full(prob, v).gradient;
}

}  // namespace dualact
