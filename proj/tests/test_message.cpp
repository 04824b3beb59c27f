// Copyright 2026 The ndsim Authors
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


#include <set>

#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace testing;

TEST_CASE("sealed messages verify only for their principal") {
  auto const m = seal(kA, Beacon{kA, 42, std::nullopt});
  CHECK(verify(m, kA));
  CHECK_FALSE(verify(m, kB));
  CHECK(m.auth_tag.genuine);
  CHECK(m.auth_tag.claimed_principal == kA);
}

TEST_CASE("forged messages never verify") {
  auto const claimed_a = forge(kA, Beacon{kA, 0, std::nullopt});
  CHECK_FALSE(verify(claimed_a, kA));
  CHECK_FALSE(verify(claimed_a, kE));
  auto const response = forge(kB, Response{kB, Nonce{kA, 0}, Position{1, 2}});
  CHECK_FALSE(verify(response, kB));
}

TEST_CASE("a replayed copy still verifies and is unchanged") {
  auto const original = seal(kB, Response{kB, Nonce{kA, 3}, Position{10, 0}});
  AuthenticatedMessage const copy = original;
  CHECK(copy == original);
  CHECK(verify(copy, kB));
}

TEST_CASE("speaker_of names the principal of each body") {
  CHECK(speaker_of(Beacon{kA, 0, std::nullopt}) == kA);
  CHECK(speaker_of(Challenge{kB, Nonce{kB, 0}}) == kB);
  CHECK(speaker_of(Response{kE, Nonce{kA, 0}, std::nullopt}) == kE);
}

TEST_CASE("message kinds") {
  CHECK(kind_of(Beacon{}) == MessageKind::Beacon);
  CHECK(kind_of(Challenge{}) == MessageKind::Challenge);
  CHECK(kind_of(Response{}) == MessageKind::Response);
  CHECK(to_string(MessageKind::Challenge) == "challenge");
}

TEST_CASE("nonces are fresh per node and never repeat") {
  NonceRegistry reg;
  CHECK(reg.fresh_nonce(kA) == Nonce{kA, 0});
  CHECK(reg.fresh_nonce(kA) == Nonce{kA, 1});
  CHECK(reg.fresh_nonce(kB) == Nonce{kB, 0});
  std::set<Nonce> seen;
  for (int i = 0; i < 1000; ++i) {
    CHECK(seen.insert(reg.fresh_nonce(i % 3 == 0 ? kA : kB)).second);
  }
}

TEST_CASE("relayed transmissions carry the original message bit for bit") {
  auto s = pair_scenario(ProtocolKind::CRT, 50);
  add_relay(s, 25, 100'000);
  auto const trace = simulate(s);
  std::size_t relays = 0;
  for (auto const& t : trace.transmissions) {
    if (!t.parent) continue;
    ++relays;
    auto const& heard = trace.tx(trace.dv(*t.parent).tx_id);
    CHECK(t.msg == heard.msg);
    CHECK(t.msg.auth_tag.claimed_principal != t.sender);
  }
  CHECK(relays > 0);
}
