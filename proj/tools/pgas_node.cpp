// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

// One node of a two-node world. Start node_a first; it listens on the
// endpoint and node_b connects. Every PE then runs a short exchange: a put
// and a fetch_add to its right neighbour, which may live on the other node.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "pgas/pgas.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-node PGAS daemon"};
  std::string config_path, role, endpoint;
  int npes = 0, world = 0, rounds = 100;
  app.add_option("--config", config_path, "key = value runtime config");
  app.add_option("--role", role, "node_a or node_b")->check(CLI::IsMember({"node_a", "node_b"}));
  app.add_option("--endpoint", endpoint, "host:port");
  app.add_option("--npes", npes, "Local PEs")->check(CLI::PositiveNumber);
  app.add_option("--world", world, "Expected world size")->check(CLI::NonNegativeNumber);
  app.add_option("--rounds", rounds, "Exchange rounds")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    pgas::RuntimeConfig cfg = pgas::load_config_from_env();
    if (!config_path.empty()) cfg = pgas::load_config_file(config_path, cfg);
    if (!role.empty()) cfg.internode_role = *pgas::parse_internode_role(role);
    if (!endpoint.empty()) cfg.peer_endpoint = endpoint;
    if (npes) cfg.npes = npes;
    if (world) cfg.world_npes = world;
    if (cfg.internode_role == pgas::InternodeRole::standalone)
      throw pgas::Error(pgas::ErrorCode::invalid_config, "internode_role must be node_a or node_b");

    pgas::Runtime rt(cfg);
    std::fprintf(stderr, "%s: PEs %d..%d of %d\n",
                 std::string(pgas::to_string(cfg.internode_role)).c_str(), rt.pe_base(),
                 rt.pe_base() + rt.local_npes() - 1, rt.n_pes());
    int bad = 0;
    rt.run([&](pgas::Context& ctx) {
      const int n = ctx.n_pes();
      const pgas::PeId right = (ctx.my_pe() + 1) % n;
      const pgas::PeId left = (ctx.my_pe() + n - 1) % n;
      auto mailbox = ctx.symm_alloc(sizeof(std::uint64_t));
      auto counter = ctx.symm_alloc(sizeof(std::uint64_t));
      for (int r = 0; r < rounds; ++r) {
        const std::uint64_t v = (std::uint64_t(ctx.my_pe()) << 32) | std::uint32_t(r);
        pgas::put(ctx, mailbox, &v, sizeof v, right);
        pgas::atomic_fetch_add<std::uint64_t>(ctx, counter, 1, right);
        pgas::barrier_all(ctx);
        const std::uint64_t got = *ctx.local<std::uint64_t>(mailbox);
        if (got != ((std::uint64_t(left) << 32) | std::uint32_t(r))) ++bad;
        pgas::barrier_all(ctx);
      }
      if (*ctx.local<std::uint64_t>(counter) != std::uint64_t(rounds)) ++bad;
    });
    rt.finalize();
    std::printf("%d rounds, %d mismatches\n", rounds, bad);
    return bad ? 1 : 0;
  } catch (const pgas::Error& e) {
    std::fprintf(stderr, "pgas-node: %s\n", e.what());
    const auto c = e.code();
    return c == pgas::ErrorCode::invalid_config || c == pgas::ErrorCode::geometry_mismatch ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pgas-node: %s\n", e.what());
    return 1;
  }
}
