// Copyright 2026 The tailnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tailnoise/backends.h"

#include <cmath>

#include "tailnoise/duration.h"
#include "tailnoise/errors.h"

namespace tailnoise {

ServiceModel ServiceModel::Fixed(int64_t ns) {
  ServiceModel m;
  m.kind = Kind::kFixed;
  m.fixed_ns = ns;
  return m;
}

ServiceModel ServiceModel::Lognormal(double mu, double sigma) {
  ServiceModel m;
  m.kind = Kind::kLognormal;
  m.mu = mu;
  m.sigma = sigma;
  return m;
}

ServiceModel ServiceModel::Bimodal(int64_t fast_ns, int64_t slow_ns, double p_slow) {
  ServiceModel m;
  m.kind = Kind::kBimodal;
  m.fast_ns = fast_ns;
  m.slow_ns = slow_ns;
  m.p_slow = p_slow;
  return m;
}

void ServiceModel::Validate() const {
  switch (kind) {
    case Kind::kFixed:
      if (fixed_ns <= 0) throw ValidationError("service model: duration must be > 0");
      break;
    case Kind::kLognormal:
      if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0) {
        throw ValidationError("service model: lognormal needs finite mu and sigma >= 0");
      }
      break;
    case Kind::kBimodal:
      if (fast_ns <= 0 || slow_ns <= 0) {
        throw ValidationError("service model: durations must be > 0");
      }
      if (!(p_slow >= 0 && p_slow <= 1)) {
        throw ValidationError("service model: p_slow must be in [0, 1]");
      }
      break;
  }
}

std::string ServiceModel::Describe() const {
  switch (kind) {
    case Kind::kFixed:
      return "fixed:" + FormatDuration(fixed_ns);
    case Kind::kLognormal:
      return "lognormal:mu=" + std::to_string(mu) + ":sigma=" + std::to_string(sigma);
    case Kind::kBimodal:
      return "bimodal:" + FormatDuration(fast_ns) + ":" + FormatDuration(slow_ns) +
             ":p_slow=" + std::to_string(p_slow);
  }
  return "?";
}

ServiceTimeSampler::ServiceTimeSampler(ServiceModel model, uint64_t seed)
    : model_(model), rng_(seed) {
  model_.Validate();
}

int64_t ServiceTimeSampler::Next() {
  switch (model_.kind) {
    case ServiceModel::Kind::kFixed:
      return model_.fixed_ns;
    case ServiceModel::Kind::kLognormal: {
      const double z = normal_(rng_);
      const double ns = std::exp(model_.mu + model_.sigma * z);
      if (!(ns >= 1)) return 1;
      if (ns > 9.0e18) return static_cast<int64_t>(9.0e18);
      return static_cast<int64_t>(std::llround(ns));
    }
    case ServiceModel::Kind::kBimodal:
      return UniformUnit(rng_) < model_.p_slow ? model_.slow_ns : model_.fast_ns;
  }
  return 1;
}

StubBackend::StubBackend(ServiceModel model, uint64_t seed, int64_t spin_window_ns)
    : sampler_(model, seed), spin_window_ns_(spin_window_ns) {}

Response StubBackend::Execute(const Request& request) {
  const int64_t deadline = MonotonicNanos() + sampler_.Next();
  WaitUntil(deadline, spin_window_ns_);
  Response r;
  if (request.txn == TxnType::kRead) {
    r.rows_returned = 1;
  } else if (request.txn == TxnType::kScan) {
    r.rows_returned = request.scan_length.value_or(0);
  }
  return r;
}

}  // namespace tailnoise
