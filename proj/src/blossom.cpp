#include "mwucb/blossom.hpp"

#include <algorithm>
#include <stdexcept>

namespace mwucb::blossom {
namespace {

// Primal-dual weighted matching. Vertices are 0..n-1, blossoms n..2n-1.
// Edge k has endpoints 2k (its u side) and 2k+1 (its v side); endpoint p
// names vertex endpoint_[p], and p ^ 1 is the opposite end of the same edge.
class Matcher {
 public:
  Matcher(std::size_t n, const std::vector<WeightedEdge>& edges)
      : n_(static_cast<long>(n)), edges_(edges) {
    const long m = static_cast<long>(edges_.size());
    double max_weight = 0.0;
    for (const auto& e : edges_) {
      if (e.u >= n || e.v >= n) throw std::invalid_argument("matching edge endpoint out of range");
      if (e.u == e.v) throw std::invalid_argument("matching edge is a self-loop");
      max_weight = std::max(max_weight, e.weight);
    }
    endpoint_.resize(2 * m);
    neighbend_.assign(n, {});
    for (long k = 0; k < m; ++k) {
      endpoint_[2 * k] = static_cast<long>(edges_[k].u);
      endpoint_[2 * k + 1] = static_cast<long>(edges_[k].v);
      neighbend_[edges_[k].u].push_back(2 * k + 1);
      neighbend_[edges_[k].v].push_back(2 * k);
    }
    mate_.assign(n, -1);
    label_.assign(2 * n, 0);
    labelend_.assign(2 * n, -1);
    inblossom_.resize(n);
    for (long v = 0; v < n_; ++v) inblossom_[v] = v;
    blossomparent_.assign(2 * n, -1);
    blossomchilds_.assign(2 * n, {});
    blossombase_.assign(2 * n, -1);
    for (long v = 0; v < n_; ++v) blossombase_[v] = v;
    blossomendps_.assign(2 * n, {});
    bestedge_.assign(2 * n, -1);
    blossombestedges_.assign(2 * n, {});
    has_bestedges_.assign(2 * n, false);
    for (long b = 2 * n_ - 1; b >= n_; --b) unused_.push_back(b);
    dualvar_.assign(2 * n, 0.0);
    for (long v = 0; v < n_; ++v) dualvar_[v] = max_weight;
    allowedge_.assign(m, false);
  }

  std::vector<long> solve() {
    if (edges_.empty()) return std::vector<long>(n_, kUnmatched);
    for (long stage = 0; stage < n_; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (long b = n_; b < 2 * n_; ++b) {
        blossombestedges_[b].clear();
        has_bestedges_[b] = false;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), false);
      queue_.clear();
      for (long v = 0; v < n_; ++v)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          const long v = queue_.back();
          queue_.pop_back();
          for (long p : neighbend_[v]) {
            const long k = p / 2;
            const long w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            double kslack = 0.0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge_[k] = true;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                const long base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              const long b = inblossom_[v];
              if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        // No augmenting path with tight edges: adjust the duals.
        int deltatype = 1;
        double delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n_);
        long deltaedge = -1;
        long deltablossom = -1;
        for (long v = 0; v < n_; ++v) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
            const double d = slack(bestedge_[v]);
            if (d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        for (long b = 0; b < 2 * n_; ++b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
            const double d = slack(bestedge_[b]) / 2.0;
            if (d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        }
        for (long b = n_; b < 2 * n_; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
              dualvar_[b] < delta) {
            delta = dualvar_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }

        for (long v = 0; v < n_; ++v) {
          if (label_[inblossom_[v]] == 1)
            dualvar_[v] -= delta;
          else if (label_[inblossom_[v]] == 2)
            dualvar_[v] += delta;
        }
        for (long b = n_; b < 2 * n_; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1)
              dualvar_[b] += delta;
            else if (label_[b] == 2)
              dualvar_[b] -= delta;
          }
        }

        if (deltatype == 1) break;
        if (deltatype == 2) {
          allowedge_[deltaedge] = true;
          long i = static_cast<long>(edges_[deltaedge].u);
          long j = static_cast<long>(edges_[deltaedge].v);
          if (label_[inblossom_[i]] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = true;
          queue_.push_back(static_cast<long>(edges_[deltaedge].u));
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;

      // End of stage: expand S-blossoms whose dual dropped to zero.
      for (long b = n_; b < 2 * n_; ++b)
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
            dualvar_[b] == 0)
          expand_blossom(b, true);
    }

    std::vector<long> result(n_, kUnmatched);
    for (long v = 0; v < n_; ++v)
      if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
    return result;
  }

 private:
  double slack(long k) const {
    const auto& e = edges_[k];
    return dualvar_[e.u] + dualvar_[e.v] - 2.0 * e.weight;
  }

  void leaves(long b, std::vector<long>& out) const {
    if (b < n_) {
      out.push_back(b);
      return;
    }
    for (long t : blossomchilds_[b]) leaves(t, out);
  }

  std::vector<long> leaves(long b) const {
    std::vector<long> out;
    leaves(b, out);
    return out;
  }

  void assign_label(long w, int t, long p) {
    const long b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      leaves(b, queue_);
    } else if (t == 2) {
      const long base = blossombase_[b];
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  // Trace back from v and w to find a common base (new blossom) or -1
  // (augmenting path).
  long scan_blossom(long v, long w) {
    std::vector<long> path;
    long base = -1;
    while (v != -1 || w != -1) {
      long b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (long b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(long base, long k) {
    long v = static_cast<long>(edges_[k].u);
    long w = static_cast<long>(edges_[k].v);
    const long bb = inblossom_[base];
    long bv = inblossom_[v];
    long bw = inblossom_[w];
    const long b = unused_.back();
    unused_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0.0;
    for (long leaf : leaves(b)) {
      if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
      inblossom_[leaf] = b;
    }

    std::vector<long> bestedgeto(2 * n_, -1);
    for (long sub : path) {
      std::vector<long> candidates;
      if (!has_bestedges_[sub]) {
        for (long leaf : leaves(sub))
          for (long p : neighbend_[leaf]) candidates.push_back(p / 2);
      } else {
        candidates = blossombestedges_[sub];
      }
      for (long kk : candidates) {
        long i = static_cast<long>(edges_[kk].u);
        long j = static_cast<long>(edges_[kk].v);
        if (inblossom_[j] == b) std::swap(i, j);
        const long bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 &&
            (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
          bestedgeto[bj] = kk;
      }
      blossombestedges_[sub].clear();
      has_bestedges_[sub] = false;
      bestedge_[sub] = -1;
    }
    auto& mine = blossombestedges_[b];
    mine.clear();
    for (long kk : bestedgeto)
      if (kk != -1) mine.push_back(kk);
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (long kk : mine)
      if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }

  static long index_in(const std::vector<long>& v, long x) {
    return static_cast<long>(std::find(v.begin(), v.end(), x) - v.begin());
  }

  // Index into a cyclic child/endpoint list with possibly negative j.
  static long wrap(long j, long size) { return j < 0 ? j + size : j; }

  void expand_blossom(long b, bool endstage) {
    const std::vector<long> childs = blossomchilds_[b];
    for (long s : childs) {
      blossomparent_[s] = -1;
      if (s < n_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for (long leaf : leaves(s)) inblossom_[leaf] = s;
      }
    }

    if (!endstage && label_[b] == 2) {
      // Relabel the children the alternating path runs through.
      const auto& endps = blossomendps_[b];
      const long size = static_cast<long>(childs.size());
      const long entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      long j = index_in(childs, entrychild);
      long jstep;
      long endptrick;
      if (j & 1) {
        j -= size;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      long p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[endps[wrap(j - endptrick, size)] ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[endps[wrap(j - endptrick, size)] / 2] = true;
        j += jstep;
        p = endps[wrap(j - endptrick, size)] ^ endptrick;
        allowedge_[p / 2] = true;
        j += jstep;
      }
      const long bv = childs[wrap(j, size)];
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (childs[wrap(j, size)] != entrychild) {
        const long sub = childs[wrap(j, size)];
        if (label_[sub] == 1) {
          j += jstep;
          continue;
        }
        long v = -1;
        for (long leaf : leaves(sub)) {
          v = leaf;
          if (label_[leaf] != 0) break;
        }
        if (v >= 0 && label_[v] != 0) {
          label_[v] = 0;
          label_[endpoint_[mate_[blossombase_[sub]]]] = 0;
          assign_label(v, 2, labelend_[v]);
        }
        j += jstep;
      }
    }

    label_[b] = 0;
    labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unused_.push_back(b);
  }

  // Swap matched/unmatched edges along the even path from vertex v to the
  // base of blossom b, then rotate b so v becomes its base.
  void augment_blossom(long b, long v) {
    long t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const long size = static_cast<long>(childs.size());
    const long i = index_in(childs, t);
    long j = i;
    long jstep;
    long endptrick;
    if (i & 1) {
      j -= size;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = childs[wrap(j, size)];
      const long p = endps[wrap(j - endptrick, size)] ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = childs[wrap(j, size)];
      if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
  }

  void augment_matching(long k) {
    const long v = static_cast<long>(edges_[k].u);
    const long w = static_cast<long>(edges_[k].v);
    const std::pair<long, long> sides[2] = {{v, 2 * k + 1}, {w, 2 * k}};
    for (auto [s, p] : sides) {
      while (true) {
        const long bs = inblossom_[s];
        if (bs >= n_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        const long t = endpoint_[labelend_[bs]];
        const long bt = inblossom_[t];
        s = endpoint_[labelend_[bt]];
        const long j = endpoint_[labelend_[bt] ^ 1];
        if (bt >= n_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  long n_;
  const std::vector<WeightedEdge>& edges_;
  std::vector<long> endpoint_;
  std::vector<std::vector<long>> neighbend_;
  std::vector<long> mate_;
  std::vector<int> label_;
  std::vector<long> labelend_;
  std::vector<long> inblossom_;
  std::vector<long> blossomparent_;
  std::vector<std::vector<long>> blossomchilds_;
  std::vector<long> blossombase_;
  std::vector<std::vector<long>> blossomendps_;
  std::vector<long> bestedge_;
  std::vector<std::vector<long>> blossombestedges_;
  std::vector<bool> has_bestedges_;
  std::vector<long> unused_;
  std::vector<double> dualvar_;
  std::vector<bool> allowedge_;
  std::vector<long> queue_;
};

}  // namespace

std::vector<long> max_weight_matching(std::size_t vertex_count,
                                      const std::vector<WeightedEdge>& edges) {
  return Matcher(vertex_count, edges).solve();
}

}  // namespace mwucb::blossom
