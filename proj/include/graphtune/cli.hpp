#pragma once

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>

#include "graphtune/config.hpp"
#include "graphtune/http.hpp"
#include "graphtune/pipeline.hpp"

namespace graphtune {

namespace detail {

inline void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes << '\n';
  } else {
    write_file(path, bytes);
  }
}

inline Graph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

}  // namespace detail

/// Entry point of the graphtune command line tool. Returns the process exit
/// code: 0 on success, 1 on a library error, 2 on bad usage.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exemplar-based fine-tuning of graph layouts"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Pipeline configuration (JSON)");
  app.add_option("--seed", seed, "Seed for reference layouts");

  std::function<void()> action;
  PipelineConfig cfg;
  auto load_config = [&] {
    if (!config_path.empty()) cfg = parse_config(read_file(config_path));
    if (seed) cfg.seed = *seed;
  };

  std::string graph, exemplar, modified, source, target, markers, structure, before, after, output, extra, cache;
  std::optional<int> k, min_count, max_count;
  std::optional<double> epsilon, r_u, r_d, alpha, beta, gamma, w;

  auto* embed = app.add_subcommand("embed", "Compute (or load cached) structural node embeddings");
  embed->add_option("--graph", graph)->required();
  embed->add_option("--cache", cache, "Cache file to read and refresh");
  embed->add_option("--out", output);
  embed->callback([&] {
    action = [&] {
      load_config();
      const auto g = detail::load_graph(graph);
      const auto emb = cached_embeddings(g, cfg.embedding, cache.empty() ? cfg.embedding_cache : cache);
      detail::emit(output, serialize_embedding_cache(emb, cfg.embedding, graph_hash(g)), out);
    };
  });

  auto* retrieve = app.add_subcommand("retrieve", "Suggest structures similar to an exemplar");
  retrieve->add_option("--graph", graph)->required();
  retrieve->add_option("--exemplar", exemplar)->required();
  retrieve->add_option("--k", k);
  retrieve->add_option("--min", min_count);
  retrieve->add_option("--max", max_count);
  retrieve->add_option("--epsilon", epsilon);
  retrieve->add_option("--out", output);
  retrieve->callback([&] {
    action = [&] {
      load_config();
      if (k) cfg.retrieval.k = *k;
      if (min_count) cfg.retrieval.min_count = *min_count;
      if (max_count) cfg.retrieval.max_count = *max_count;
      if (epsilon) cfg.retrieval.epsilon = *epsilon;
      const auto g = detail::load_graph(graph);
      const auto ex = parse_structure(read_file(exemplar));
      const auto ranked =
          retrieve_similar(g, ex, cached_embeddings(g, cfg.embedding, cfg.embedding_cache), cfg.retrieval);
      json list = json::array();
      for (const auto& r : ranked) list.push_back({{"nodes", r.structure.nodes}, {"similarity", r.similarity}});
      detail::emit(output, json{{"suggestions", list}}.dump(), out);
    };
  });

  auto* match = app.add_subcommand("match", "Select markers between a source and a target structure");
  match->add_option("--source", source)->required();
  match->add_option("--target", target)->required();
  match->add_option("--correspondences", extra, "Candidate pairs; built-in matcher when absent");
  match->add_option("--r-u", r_u);
  match->add_option("--r-d", r_d);
  match->add_option("--out", output);
  match->callback([&] {
    action = [&] {
      load_config();
      if (r_u) cfg.filter.r_u = *r_u;
      if (r_d) cfg.filter.r_d = *r_d;
      cfg.validate();
      const auto s = detail::load_graph(source);
      const auto t = detail::load_graph(target);
      const auto m = extra.empty() ? auto_markers(s, t, cfg)
                                   : select_markers(s, t, parse_correspondences(read_file(extra)), cfg.filter);
      detail::emit(output, serialize_markers(m), out);
    };
  });

  auto* transfer = app.add_subcommand("transfer", "Transfer a source modification onto a target");
  transfer->add_option("--source", source)->required();
  transfer->add_option("--modified", modified)->required();
  transfer->add_option("--target", target)->required();
  transfer->add_option("--markers", markers)->required();
  transfer->add_option("--alpha", alpha);
  transfer->add_option("--beta", beta);
  transfer->add_option("--gamma", gamma);
  transfer->add_option("--w", w);
  transfer->add_option("--out", output);
  transfer->add_option("--convergence", extra, "Convergence report path (default: <out>.convergence.json)");
  transfer->callback([&] {
    action = [&] {
      load_config();
      if (alpha) cfg.deform.alpha = *alpha;
      if (beta) cfg.deform.beta = *beta;
      if (gamma) cfg.deform.gamma = *gamma;
      if (w) cfg.deform.w = *w;
      cfg.validate();
      const auto t = detail::load_graph(target);
      const auto res = transfer_modification(detail::load_graph(source), detail::load_graph(modified), t,
                                             parse_markers(read_file(markers)), cfg.deform, cfg.match);
      detail::emit(output, serialize_graph(res.layout), out);
      const json report = {{"rounds", res.rounds},
                           {"iterations", res.deform_iterations},
                           {"final_energy", res.final_energy},
                           {"markers", res.markers.size()},
                           {"marker_coverage", static_cast<double>(res.markers.size()) / static_cast<double>(t.size())}};
      const auto sidecar = !extra.empty() ? extra : (output.empty() || output == "-") ? "" : output + ".convergence.json";
      if (sidecar.empty()) {
        err << report.dump() << '\n';
      } else {
        write_file(sidecar, report.dump());
      }
    };
  });

  auto* merge = app.add_subcommand("merge", "Merge a modified structure back into its graph");
  merge->add_option("--graph", graph)->required();
  merge->add_option("--structure", structure)->required();
  merge->add_option("--modified", modified)->required();
  merge->add_option("--out", output);
  merge->callback([&] {
    action = [&] {
      load_config();
      MergeParams mp = cfg.merge;
      mp.deform = cfg.deform;
      detail::emit(output,
                   serialize_graph(merge_with_optimization(detail::load_graph(graph), parse_structure(read_file(structure)),
                                                           detail::load_graph(modified), mp)),
                   out);
    };
  });

  auto* metrics = app.add_subcommand("metrics", "Readability report for a layout change");
  metrics->add_option("--before", before)->required();
  metrics->add_option("--after", after)->required();
  metrics->add_option("--out", output);
  metrics->callback([&] {
    action = [&] {
      const auto r = readability_report(detail::load_graph(before), detail::load_graph(after));
      detail::emit(output, report_to_json(r).dump(), out);
    };
  });

  auto* pipeline = app.add_subcommand("pipeline", "Retrieve, transfer and merge in one run");
  pipeline->add_option("--graph", graph)->required();
  pipeline->add_option("--exemplar", exemplar)->required();
  pipeline->add_option("--modified", modified)->required();
  pipeline->add_option("--out", output);
  pipeline->add_option("--report", extra, "Summary path (default: stderr)");
  pipeline->callback([&] {
    action = [&] {
      load_config();
      const auto [g, ex, mod] = detail::staged("input", [&] {
        return std::tuple{detail::load_graph(graph), parse_structure(read_file(exemplar)), detail::load_graph(modified)};
      });
      const auto res = run_pipeline(g, ex, mod, cfg);
      detail::emit(output, serialize_graph(res.merged), out);
      const auto summary = pipeline_summary(res).dump();
      if (extra.empty()) {
        err << summary << '\n';
      } else {
        write_file(extra, summary);
      }
    };
  });

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--store", store, "Directory for session snapshots");
  serve->callback([&] {
    action = [&] {
      load_config();
      SessionService svc({store, cfg});
      httplib::Server srv;
      bind_http(srv, svc);
      err << "listening on " << host << ':' << port << '\n';
      if (!srv.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  try {
    action();
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace graphtune
