#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace summ::ad {

using Shape = std::vector<int>;

inline int numel(const Shape& s) {
  int n = 1;
  for (int d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ShapeError(msg);
}

struct Node {
  Shape shape;
  std::vector<double> val;
  std::vector<double> grad;
  std::function<void()> back;  // empty for leaves
};

// Named learnable array; `acc` is the Adagrad accumulator.
struct Param {
  Shape shape;
  std::vector<double> value, grad, acc;
};

class ParamStore {
 public:
  Param& add(const std::string& name, Shape shape) {
    auto [it, fresh] = params_.try_emplace(name);
    if (!fresh) throw std::invalid_argument("duplicate parameter '" + name + "'");
    Param& p = it->second;
    int n = numel(shape);
    p.shape = std::move(shape);
    p.value.assign(n, 0.0);
    p.grad.assign(n, 0.0);
    p.acc.assign(n, 0.0);
    return p;
  }
  Param& at(const std::string& name) { return params_.at(name); }
  const Param& at(const std::string& name) const { return params_.at(name); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  size_t count() const { return params_.size(); }

  void zero_grad() {
    for (auto& [name, p] : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
  }
  size_t total_entries() const {
    size_t n = 0;
    for (auto& [name, p] : params_) n += p.value.size();
    return n;
  }

 private:
  std::map<std::string, Param> params_;
};

class Graph;

struct Tensor {
  Graph* g = nullptr;
  Node* n = nullptr;
  bool valid() const { return n != nullptr; }
  const Shape& shape() const { return n->shape; }
  int size() const { return static_cast<int>(n->val.size()); }
  double value() const {
    require(n->val.size() == 1, "value(): tensor is not scalar");
    return n->val[0];
  }
  const std::vector<double>& values() const { return n->val; }
  const std::vector<double>& grads() const { return n->grad; }
};

// Reverse-mode tape. Nodes are created in topological order; backward
// walks the tape in reverse. One graph per thread of execution.
class Graph {
 public:
  Tensor make(Shape shape) {
    auto node = std::make_unique<Node>();
    node->shape = std::move(shape);
    node->val.assign(numel(node->shape), 0.0);
    node->grad.assign(node->val.size(), 0.0);
    nodes_.push_back(std::move(node));
    return {this, nodes_.back().get()};
  }

  Tensor constant(Shape shape, std::vector<double> values) {
    Tensor t = make(std::move(shape));
    require(static_cast<int>(values.size()) == t.size(),
            "constant: value count does not match shape " + shape_str(t.shape()));
    t.n->val = std::move(values);
    return t;
  }

  Tensor zeros(Shape shape) { return make(std::move(shape)); }

  Tensor scalar(double v) { return constant({1}, {v}); }

  // Leaf bound to a parameter: values copied in now, gradients flushed
  // back by accumulate_param_grads().
  Tensor leaf(Param& p) {
    Tensor t = make(p.shape);
    t.n->val = p.value;
    bindings_.emplace_back(t.n, &p);
    return t;
  }

  // Each call computes one fresh adjoint pass and adds it on top of any
  // gradients already present, so repeated calls accumulate.
  void backward(const Tensor& loss) {
    require(loss.n->val.size() == 1, "backward: loss must be scalar");
    std::vector<std::vector<double>> stash(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
      stash[i].swap(nodes_[i]->grad);
      nodes_[i]->grad.assign(stash[i].size(), 0.0);
    }
    loss.n->grad[0] = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      if ((*it)->back) (*it)->back();
    }
    accumulate_param_grads();
    for (size_t i = 0; i < nodes_.size(); ++i) {
      for (size_t j = 0; j < stash[i].size(); ++j) nodes_[i]->grad[j] += stash[i][j];
    }
  }

  size_t node_count() const { return nodes_.size(); }

 private:
  void accumulate_param_grads() {
    for (auto& [node, p] : bindings_) {
      for (size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += node->grad[i];
    }
  }

  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<std::pair<Node*, Param*>> bindings_;
};

// ---- elementwise ----

inline Tensor add(Tensor a, Tensor b) {
  require(a.shape() == b.shape(),
          "add: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = a.n->val[i] + b.n->val[i];
  Node *an = a.n, *bn = b.n, *on = out.n;
  on->back = [an, bn, on] {
    for (size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i];
      bn->grad[i] += on->grad[i];
    }
  };
  return out;
}

inline Tensor mul(Tensor a, Tensor b) {
  require(a.shape() == b.shape(),
          "mul: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = a.n->val[i] * b.n->val[i];
  Node *an = a.n, *bn = b.n, *on = out.n;
  on->back = [an, bn, on] {
    for (size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i] * bn->val[i];
      bn->grad[i] += on->grad[i] * an->val[i];
    }
  };
  return out;
}

inline Tensor scale(Tensor a, double c) {
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = a.n->val[i] * c;
  Node *an = a.n, *on = out.n;
  on->back = [an, on, c] {
    for (size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i] * c;
  };
  return out;
}

inline Tensor sub(Tensor a, Tensor b) { return add(a, scale(b, -1.0)); }

inline Tensor tanh_t(Tensor a) {
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = std::tanh(a.n->val[i]);
  Node *an = a.n, *on = out.n;
  on->back = [an, on] {
    for (size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i] * (1.0 - on->val[i] * on->val[i]);
    }
  };
  return out;
}

inline Tensor sigmoid_t(Tensor a) {
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = 1.0 / (1.0 + std::exp(-a.n->val[i]));
  Node *an = a.n, *on = out.n;
  on->back = [an, on] {
    for (size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i] * on->val[i] * (1.0 - on->val[i]);
    }
  };
  return out;
}

inline Tensor log_t(Tensor a) {
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = std::log(a.n->val[i]);
  Node *an = a.n, *on = out.n;
  on->back = [an, on] {
    for (size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i] / an->val[i];
  };
  return out;
}

// Elementwise min; ties route the gradient to the first input.
inline Tensor emin(Tensor a, Tensor b) {
  require(a.shape() == b.shape(),
          "emin: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < out.size(); ++i) out.n->val[i] = std::min(a.n->val[i], b.n->val[i]);
  Node *an = a.n, *bn = b.n, *on = out.n;
  on->back = [an, bn, on] {
    for (size_t i = 0; i < on->grad.size(); ++i) {
      if (an->val[i] <= bn->val[i]) {
        an->grad[i] += on->grad[i];
      } else {
        bn->grad[i] += on->grad[i];
      }
    }
  };
  return out;
}

// ---- reductions and vector ops ----

inline Tensor sum(Tensor a) {
  Tensor out = a.g->make({1});
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.n->val[i];
  out.n->val[0] = s;
  Node *an = a.n, *on = out.n;
  on->back = [an, on] {
    for (size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += on->grad[0];
  };
  return out;
}

inline Tensor dot(Tensor a, Tensor b) {
  require(a.shape().size() == 1 && a.shape() == b.shape(),
          "dot: need equal-length vectors, got " + shape_str(a.shape()) + " vs " +
              shape_str(b.shape()));
  Tensor out = a.g->make({1});
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.n->val[i] * b.n->val[i];
  out.n->val[0] = s;
  Node *an = a.n, *bn = b.n, *on = out.n;
  on->back = [an, bn, on] {
    for (size_t i = 0; i < an->grad.size(); ++i) {
      an->grad[i] += on->grad[0] * bn->val[i];
      bn->grad[i] += on->grad[0] * an->val[i];
    }
  };
  return out;
}

inline Tensor concat(Tensor a, Tensor b) {
  require(a.shape().size() == 1 && b.shape().size() == 1,
          "concat: need vectors, got " + shape_str(a.shape()) + " and " +
              shape_str(b.shape()));
  int na = a.size(), nb = b.size();
  Tensor out = a.g->make({na + nb});
  for (int i = 0; i < na; ++i) out.n->val[i] = a.n->val[i];
  for (int i = 0; i < nb; ++i) out.n->val[na + i] = b.n->val[i];
  Node *an = a.n, *bn = b.n, *on = out.n;
  on->back = [an, bn, on, na, nb] {
    for (int i = 0; i < na; ++i) an->grad[i] += on->grad[i];
    for (int i = 0; i < nb; ++i) bn->grad[i] += on->grad[na + i];
  };
  return out;
}

inline Tensor slice(Tensor a, int start, int len) {
  require(a.shape().size() == 1, "slice: need a vector, got " + shape_str(a.shape()));
  require(start >= 0 && len >= 0 && start + len <= a.size(),
          "slice: range [" + std::to_string(start) + "," + std::to_string(start + len) +
              ") out of " + shape_str(a.shape()));
  Tensor out = a.g->make({len});
  for (int i = 0; i < len; ++i) out.n->val[i] = a.n->val[start + i];
  Node *an = a.n, *on = out.n;
  on->back = [an, on, start, len] {
    for (int i = 0; i < len; ++i) an->grad[start + i] += on->grad[i];
  };
  return out;
}

// Numerically stable softmax over a vector.
inline Tensor softmax(Tensor a) {
  require(a.shape().size() == 1, "softmax: need a vector, got " + shape_str(a.shape()));
  Tensor out = a.g->make(a.shape());
  double mx = a.n->val[0];
  for (int i = 1; i < a.size(); ++i) mx = std::max(mx, a.n->val[i]);
  double z = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    out.n->val[i] = std::exp(a.n->val[i] - mx);
    z += out.n->val[i];
  }
  for (int i = 0; i < a.size(); ++i) out.n->val[i] /= z;
  Node *an = a.n, *on = out.n;
  on->back = [an, on] {
    double inner = 0.0;
    for (size_t i = 0; i < on->grad.size(); ++i) inner += on->grad[i] * on->val[i];
    for (size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->val[i] * (on->grad[i] - inner);
    }
  };
  return out;
}

// ---- matrix ops ----

inline Tensor matmul(Tensor a, Tensor b) {
  require(a.shape().size() == 2 && b.shape().size() == 2 && a.shape()[1] == b.shape()[0],
          "matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
              shape_str(b.shape()));
  int m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor out = a.g->make({m, n});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += a.n->val[i * k + t] * b.n->val[t * n + j];
      out.n->val[i * n + j] = s;
    }
  }
  Node *an = a.n, *bn = b.n, *on = out.n;
  on->back = [an, bn, on, m, k, n] {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        double go = on->grad[i * n + j];
        for (int t = 0; t < k; ++t) {
          an->grad[i * k + t] += go * bn->val[t * n + j];
          bn->grad[t * n + j] += go * an->val[i * k + t];
        }
      }
    }
  };
  return out;
}

// W [m,k] . x [k] -> [m]; also accepts A [n,d] . v [d] -> [n] (row dots).
inline Tensor matvec(Tensor w, Tensor x) {
  require(w.shape().size() == 2 && x.shape().size() == 1 && w.shape()[1] == x.shape()[0],
          "matvec: incompatible shapes " + shape_str(w.shape()) + " x " +
              shape_str(x.shape()));
  int m = w.shape()[0], k = w.shape()[1];
  Tensor out = w.g->make({m});
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int t = 0; t < k; ++t) s += w.n->val[i * k + t] * x.n->val[t];
    out.n->val[i] = s;
  }
  Node *wn = w.n, *xn = x.n, *on = out.n;
  on->back = [wn, xn, on, m, k] {
    for (int i = 0; i < m; ++i) {
      double go = on->grad[i];
      for (int t = 0; t < k; ++t) {
        wn->grad[i * k + t] += go * xn->val[t];
        xn->grad[t] += go * wn->val[i * k + t];
      }
    }
  };
  return out;
}

// A^T . x: A [n,d], x [n] -> [d]. Used for attention-weighted context sums.
inline Tensor matvec_t(Tensor a, Tensor x) {
  require(a.shape().size() == 2 && x.shape().size() == 1 && a.shape()[0] == x.shape()[0],
          "matvec_t: incompatible shapes " + shape_str(a.shape()) + " x " +
              shape_str(x.shape()));
  int n = a.shape()[0], d = a.shape()[1];
  Tensor out = a.g->make({d});
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a.n->val[i * d + j] * x.n->val[i];
    out.n->val[j] = s;
  }
  Node *an = a.n, *xn = x.n, *on = out.n;
  on->back = [an, xn, on, n, d] {
    for (int j = 0; j < d; ++j) {
      double go = on->grad[j];
      for (int i = 0; i < n; ++i) {
        an->grad[i * d + j] += go * xn->val[i];
        xn->grad[i] += go * an->val[i * d + j];
      }
    }
  };
  return out;
}

// H [n,k] . W^T with W [d,k] -> [n,d]: applies one linear map to every row.
inline Tensor rows_linear(Tensor h, Tensor w) {
  require(h.shape().size() == 2 && w.shape().size() == 2 && h.shape()[1] == w.shape()[1],
          "rows_linear: incompatible shapes " + shape_str(h.shape()) + " x " +
              shape_str(w.shape()));
  int n = h.shape()[0], k = h.shape()[1], d = w.shape()[0];
  Tensor out = h.g->make({n, d});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += h.n->val[i * k + t] * w.n->val[j * k + t];
      out.n->val[i * d + j] = s;
    }
  }
  Node *hn = h.n, *wn = w.n, *on = out.n;
  on->back = [hn, wn, on, n, k, d] {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        double go = on->grad[i * d + j];
        for (int t = 0; t < k; ++t) {
          hn->grad[i * k + t] += go * wn->val[j * k + t];
          wn->grad[j * k + t] += go * hn->val[i * k + t];
        }
      }
    }
  };
  return out;
}

// Adds vector v to every row of A.
inline Tensor add_rows(Tensor a, Tensor v) {
  require(a.shape().size() == 2 && v.shape().size() == 1 && a.shape()[1] == v.shape()[0],
          "add_rows: incompatible shapes " + shape_str(a.shape()) + " + " +
              shape_str(v.shape()));
  int n = a.shape()[0], d = a.shape()[1];
  Tensor out = a.g->make(a.shape());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out.n->val[i * d + j] = a.n->val[i * d + j] + v.n->val[j];
  }
  Node *an = a.n, *vn = v.n, *on = out.n;
  on->back = [an, vn, on, n, d] {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        an->grad[i * d + j] += on->grad[i * d + j];
        vn->grad[j] += on->grad[i * d + j];
      }
    }
  };
  return out;
}

// Outer product u [n] x v [d] -> [n,d].
inline Tensor outer(Tensor u, Tensor v) {
  require(u.shape().size() == 1 && v.shape().size() == 1,
          "outer: need vectors, got " + shape_str(u.shape()) + " and " +
              shape_str(v.shape()));
  int n = u.size(), d = v.size();
  Tensor out = u.g->make({n, d});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out.n->val[i * d + j] = u.n->val[i] * v.n->val[j];
  }
  Node *un = u.n, *vn = v.n, *on = out.n;
  on->back = [un, vn, on, n, d] {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        un->grad[i] += on->grad[i * d + j] * vn->val[j];
        vn->grad[j] += on->grad[i * d + j] * un->val[i];
      }
    }
  };
  return out;
}

// Stacks equal-length vectors into an [n,d] matrix.
inline Tensor stack(const std::vector<Tensor>& rows) {
  require(!rows.empty(), "stack: no rows");
  int d = rows[0].size();
  for (const auto& r : rows) {
    require(r.shape().size() == 1 && r.size() == d,
            "stack: inconsistent row shape " + shape_str(r.shape()));
  }
  int n = static_cast<int>(rows.size());
  Tensor out = rows[0].g->make({n, d});
  std::vector<Node*> ins;
  for (int i = 0; i < n; ++i) {
    ins.push_back(rows[i].n);
    for (int j = 0; j < d; ++j) out.n->val[i * d + j] = rows[i].n->val[j];
  }
  Node* on = out.n;
  on->back = [ins, on, d] {
    for (size_t i = 0; i < ins.size(); ++i) {
      for (int j = 0; j < d; ++j) ins[i]->grad[j] += on->grad[i * d + j];
    }
  };
  return out;
}

// ---- embedding / output ops ----

// Row lookup with scatter-add gradient.
inline Tensor embedding(Tensor table, int id) {
  require(table.shape().size() == 2, "embedding: table must be a matrix");
  int v = table.shape()[0], e = table.shape()[1];
  require(id >= 0 && id < v, "embedding: id " + std::to_string(id) + " out of table " +
                                 shape_str(table.shape()));
  Tensor out = table.g->make({e});
  for (int j = 0; j < e; ++j) out.n->val[j] = table.n->val[id * e + j];
  Node *tn = table.n, *on = out.n;
  on->back = [tn, on, id, e] {
    for (int j = 0; j < e; ++j) tn->grad[id * e + j] += on->grad[j];
  };
  return out;
}

// log(dist[idx] + floor), the stabilized pick used by the sequence loss.
inline Tensor pick_log(Tensor dist, int idx, double floor = 1e-12) {
  require(dist.shape().size() == 1, "pick_log: need a vector");
  require(idx >= 0 && idx < dist.size(),
          "pick_log: index " + std::to_string(idx) + " out of " + shape_str(dist.shape()));
  Tensor out = dist.g->make({1});
  out.n->val[0] = std::log(dist.n->val[idx] + floor);
  Node *dn = dist.n, *on = out.n;
  on->back = [dn, on, idx, floor] {
    dn->grad[idx] += on->grad[0] / (dn->val[idx] + floor);
  };
  return out;
}

// Pointer-generator mixture over the extended vocabulary:
// out[w] = p_gen * P_vocab[w] + (1 - p_gen) * sum_{i: ext_ids[i]=w} alpha[i].
inline Tensor pointer_combine(Tensor p_gen, Tensor p_vocab, Tensor alpha,
                              const std::vector<int>& ext_ids, int ext_size) {
  require(p_gen.size() == 1, "pointer_combine: p_gen must be scalar");
  require(p_vocab.shape().size() == 1 && alpha.shape().size() == 1,
          "pointer_combine: need vector distributions");
  require(static_cast<int>(ext_ids.size()) == alpha.size(),
          "pointer_combine: alpha length " + shape_str(alpha.shape()) +
              " vs source length " + std::to_string(ext_ids.size()));
  require(ext_size >= p_vocab.size(), "pointer_combine: extended size below vocab size");
  int v = p_vocab.size();
  Tensor out = p_gen.g->make({ext_size});
  double pg = p_gen.n->val[0];
  for (int w = 0; w < v; ++w) out.n->val[w] = pg * p_vocab.n->val[w];
  for (size_t i = 0; i < ext_ids.size(); ++i) {
    require(ext_ids[i] >= 0 && ext_ids[i] < ext_size,
            "pointer_combine: extended id out of range");
    out.n->val[ext_ids[i]] += (1.0 - pg) * alpha.n->val[i];
  }
  Node *pn = p_gen.n, *vn = p_vocab.n, *an = alpha.n, *on = out.n;
  on->back = [pn, vn, an, on, ext_ids, v] {
    double pg = pn->val[0];
    double dpg = 0.0;
    for (int w = 0; w < v; ++w) {
      vn->grad[w] += on->grad[w] * pg;
      dpg += on->grad[w] * vn->val[w];
    }
    for (size_t i = 0; i < ext_ids.size(); ++i) {
      an->grad[i] += on->grad[ext_ids[i]] * (1.0 - pg);
      dpg -= on->grad[ext_ids[i]] * an->val[i];
    }
    pn->grad[0] += dpg;
  };
  return out;
}

// Zero-pads a vector up to `total` entries; gradient flows to the prefix.
inline Tensor pad_zeros(Tensor a, int total) {
  require(a.shape().size() == 1 && total >= a.size(),
          "pad_zeros: bad target size " + std::to_string(total) + " for " +
              shape_str(a.shape()));
  if (total == a.size()) return a;
  Tensor out = a.g->make({total});
  for (int i = 0; i < a.size(); ++i) out.n->val[i] = a.n->val[i];
  Node *an = a.n, *on = out.n;
  int n = a.size();
  on->back = [an, on, n] {
    for (int i = 0; i < n; ++i) an->grad[i] += on->grad[i];
  };
  return out;
}

// ---- gradient checking ----

// Compares analytic gradients against central finite differences for
// every entry of every parameter. `build` constructs the forward graph
// from the store's current values and returns the scalar loss tensor.
struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  int worst_index = -1;
};

inline GradCheckReport grad_check(ParamStore& ps,
                                  const std::function<Tensor(Graph&)>& build,
                                  double eps = 1e-5) {
  if (!(eps > 0)) throw std::invalid_argument("grad_check: eps must be positive");
  ps.zero_grad();
  {
    Graph g;
    Tensor loss = build(g);
    if (!std::isfinite(loss.value())) throw std::runtime_error("grad_check: non-finite loss");
    g.backward(loss);
  }
  auto eval = [&]() {
    Graph g;
    double v = build(g).value();
    if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite loss");
    return v;
  };
  GradCheckReport rep;
  for (auto& [name, p] : ps) {
    for (size_t i = 0; i < p.value.size(); ++i) {
      double saved = p.value[i];
      p.value[i] = saved + eps;
      double hi = eval();
      p.value[i] = saved - eps;
      double lo = eval();
      p.value[i] = saved;
      double numeric = (hi - lo) / (2.0 * eps);
      double analytic = p.grad[i];
      double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-8});
      double rel = std::fabs(numeric - analytic) / denom;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name;
        rep.worst_index = static_cast<int>(i);
      }
    }
  }
  return rep;
}

}  // namespace summ::ad
