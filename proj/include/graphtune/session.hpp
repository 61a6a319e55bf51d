#pragma once

#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphtune/config.hpp"
#include "graphtune/io.hpp"
#include "graphtune/pipeline.hpp"

namespace graphtune {

/// An exemplar's recorded modification: layout before, layout after and the
/// markers chosen at copy time (possibly none).
struct Clipboard {
  Graph source;
  Graph modified;
  MarkerSet markers;
};

/// Transfer result for one target, shown to the user before it is committed.
struct Proposal {
  Structure target;
  Graph layout;
  MarkerSet markers;
  int rounds = 0;
};

struct HistoryEntry {
  std::vector<Structure> structures;
  Graph before;
  Graph after;
};

struct Session {
  std::string id;
  std::uint64_t revision = 0;
  PipelineConfig config;
  std::optional<Graph> graph;
  std::optional<Structure> exemplar;
  /// Working copy of the exemplar's layout, edited through exemplar/positions.
  std::optional<Graph> exemplar_layout;
  std::vector<RankedSuggestion> targets;
  std::optional<Clipboard> clipboard;
  std::map<std::size_t, Proposal> pending;
  std::vector<HistoryEntry> history;
  /// Number of history entries currently applied; below history.size() after undo.
  std::size_t cursor = 0;
  std::optional<std::string> embed_job;
};

struct Response {
  int status = 200;
  json body;
};

namespace detail {

inline json proposal_to_json(const Proposal& p) {
  return {{"target", structure_to_json(p.target)},
          {"layout", graph_to_json(p.layout)},
          {"markers", pairs_to_json(p.markers.pairs)["pairs"]},
          {"fallback", p.markers.fallback},
          {"rounds", p.rounds}};
}

inline Proposal proposal_from_json(const json& j) {
  Proposal p;
  p.target = structure_from_json(j.at("target"));
  p.layout = graph_from_json(j.at("layout"));
  p.markers.pairs = pairs_from_json({{"pairs", j.at("markers")}});
  p.markers.fallback = j.at("fallback").get<bool>();
  p.rounds = j.at("rounds").get<int>();
  return p;
}

inline json optional_graph(const std::optional<Graph>& g) { return g ? graph_to_json(*g) : json(nullptr); }

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::StaleRevision:
    case ErrorCode::EmptyClipboard: return 409;
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateTransform:
    case ErrorCode::Infeasible:
    case ErrorCode::NumericalFailure:
    case ErrorCode::NoAnchors:
    case ErrorCode::CoincidentNodes: return 422;
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    if (end > i) out.emplace_back(path.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

inline bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (const char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

}  // namespace detail

inline json session_to_json(const Session& s) {
  json targets = json::array();
  for (const auto& t : s.targets) targets.push_back({{"structure", structure_to_json(t.structure)}, {"similarity", t.similarity}});
  json pending = json::object();
  for (const auto& [k, p] : s.pending) pending[std::to_string(k)] = detail::proposal_to_json(p);
  json history = json::array();
  for (const auto& h : s.history) {
    json structures = json::array();
    for (const auto& st : h.structures) structures.push_back(structure_to_json(st));
    history.push_back({{"structures", structures}, {"before", graph_to_json(h.before)}, {"after", graph_to_json(h.after)}});
  }
  json clip = nullptr;
  if (s.clipboard) {
    clip = {{"source", graph_to_json(s.clipboard->source)},
            {"modified", graph_to_json(s.clipboard->modified)},
            {"markers", pairs_to_json(s.clipboard->markers.pairs)["pairs"]}};
  }
  return {{"id", s.id},
          {"revision", s.revision},
          {"config", config_to_json(s.config)},
          {"graph", detail::optional_graph(s.graph)},
          {"exemplar", s.exemplar ? structure_to_json(*s.exemplar) : json(nullptr)},
          {"exemplar_layout", detail::optional_graph(s.exemplar_layout)},
          {"targets", targets},
          {"clipboard", clip},
          {"pending", pending},
          {"history", history},
          {"cursor", s.cursor}};
}

inline Session session_from_json(const json& j) {
  Session s;
  try {
    s.id = j.at("id").get<std::string>();
    s.revision = j.at("revision").get<std::uint64_t>();
    s.config = config_from_json(j.at("config"));
    if (!j.at("graph").is_null()) s.graph = graph_from_json(j["graph"]);
    if (!j.at("exemplar").is_null()) s.exemplar = structure_from_json(j["exemplar"]);
    if (!j.at("exemplar_layout").is_null()) s.exemplar_layout = graph_from_json(j["exemplar_layout"]);
    for (const auto& t : j.at("targets")) s.targets.push_back({structure_from_json(t.at("structure")), t.at("similarity").get<double>()});
    if (!j.at("clipboard").is_null()) {
      const auto& c = j["clipboard"];
      s.clipboard = Clipboard{graph_from_json(c.at("source")), graph_from_json(c.at("modified")),
                              MarkerSet{pairs_from_json({{"pairs", c.at("markers")}})}};
    }
    for (const auto& [k, p] : j.at("pending").items()) s.pending[std::stoul(k)] = detail::proposal_from_json(p);
    for (const auto& h : j.at("history")) {
      HistoryEntry e{{}, graph_from_json(h.at("before")), graph_from_json(h.at("after"))};
      for (const auto& st : h.at("structures")) e.structures.push_back(structure_from_json(st));
      s.history.push_back(std::move(e));
    }
    s.cursor = j.at("cursor").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedSyntax, std::string("bad session snapshot: ") + e.what());
  }
  if (s.cursor > s.history.size()) throw Error(ErrorCode::MalformedSyntax, "bad session snapshot: cursor past history");
  return s;
}

/// Session workflow behind the HTTP API. handle() is transport-free: it takes
/// a method, a path and a JSON body and returns a status and a JSON body.
/// Sessions are independent; calls on one session are serialized by its own
/// mutex. With a store directory every mutation writes <dir>/<id>.json and
/// unknown ids are looked up there.
class SessionService {
 public:
  struct Options {
    std::string store_dir;
    PipelineConfig defaults;
  };

  SessionService() = default;
  explicit SessionService(Options opts) : opts_(std::move(opts)) {
    if (!opts_.store_dir.empty()) std::filesystem::create_directories(opts_.store_dir);
  }

  Response handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
      const json doc = body.empty() ? json::object() : detail::parse_json(body);
      if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
      return route(method, detail::split_path(path), doc);
    } catch (const Error& e) {
      return {detail::status_for(e.code()), {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}}};
    } catch (const json::exception& e) {
      return {400, {{"error", {{"code", "invalid_argument"}, {"message", e.what()}}}}};
    }
  }

  /// Blocks until a job finishes.
  void wait_job(const std::string& id) {
    const auto job = find_job(id);
    job->result.wait();
  }

 private:
  struct Entry {
    std::mutex mu;
    Session session;
  };

  struct Job {
    std::string id;
    std::string session;
    std::shared_future<EmbeddingSet> result;
  };

  Response route(std::string_view method, const std::vector<std::string>& p, const json& body) {
    if (p.size() == 2 && p[0] == "jobs" && method == "GET") return job_status(p[1]);
    if (p.empty() || p[0] != "sessions") throw Error(ErrorCode::NotFound, "no such endpoint");
    if (p.size() == 1 && method == "POST") return create(body);
    if (p.size() < 2) throw Error(ErrorCode::NotFound, "no such endpoint");

    auto entry = find_session(p[1]);
    std::lock_guard lock(entry->mu);
    auto& s = entry->session;
    if (method == "GET") {
      if (p.size() == 2) return {200, session_to_json(s)};
      if (p.size() == 3 && p[2] == "history") return {200, history_json(s)};
      throw Error(ErrorCode::NotFound, "no such endpoint");
    }
    if (method != "POST" || p.size() < 3) throw Error(ErrorCode::NotFound, "no such endpoint");

    check_revision(s, body);
    Session next = s;
    json extra = json::object();
    const auto& op = p[2];
    if (op == "graph" && p.size() == 3) {
      load_graph(next, body);
      extra["job"] = *next.embed_job;
    } else if (op == "exemplar" && p.size() == 3) {
      select_exemplar(next, body);
    } else if (op == "exemplar" && p.size() == 4 && p[3] == "positions") {
      move_exemplar_nodes(next, body);
    } else if (op == "retrieve" && p.size() == 3) {
      retrieve(next, body);
      extra["targets"] = targets_json(next);
    } else if (op == "copy" && p.size() == 3) {
      copy(next, body);
    } else if (op == "paste" && p.size() == 4) {
      extra["proposal"] = detail::proposal_to_json(paste(next, p[3], body));
    } else if (op == "commit" && p.size() == 3) {
      commit(next, body);
      extra["graph"] = graph_to_json(*next.graph);
    } else if (op == "undo" && p.size() == 3) {
      undo(next);
      extra["graph"] = graph_to_json(*next.graph);
    } else if (op == "redo" && p.size() == 3) {
      redo(next);
      extra["graph"] = graph_to_json(*next.graph);
    } else {
      throw Error(ErrorCode::NotFound, "no such endpoint");
    }
    ++next.revision;
    persist(next);
    s = std::move(next);
    extra["revision"] = s.revision;
    return {200, extra};
  }

  Response create(const json& body) {
    Session s;
    s.config = opts_.defaults;
    if (body.contains("config")) s.config = config_from_json(body["config"]);
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(mu_);
      do {
        s.id = "s" + std::to_string(++next_session_);
      } while (sessions_.count(s.id) || (!opts_.store_dir.empty() && std::filesystem::exists(snapshot_path(s.id))));
      entry = std::make_shared<Entry>();
      entry->session = s;
      sessions_[s.id] = entry;
    }
    persist(s);
    return {201, {{"id", s.id}, {"revision", s.revision}}};
  }

  std::shared_ptr<Entry> find_session(const std::string& id) {
    std::lock_guard lock(mu_);
    if (const auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    if (!opts_.store_dir.empty() && detail::safe_id(id) && std::filesystem::exists(snapshot_path(id))) {
      auto entry = std::make_shared<Entry>();
      entry->session = session_from_json(detail::parse_json(read_file(snapshot_path(id))));
      sessions_[id] = entry;
      return entry;
    }
    throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    std::lock_guard lock(mu_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "unknown job '" + id + "'");
    return it->second;
  }

  Response job_status(const std::string& id) {
    const auto job = find_job(id);
    json out = {{"id", job->id}, {"kind", "embed"}, {"session", job->session}};
    if (job->result.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
      out["status"] = "running";
      return {200, out};
    }
    try {
      const auto& emb = job->result.get();
      out["status"] = "done";
      out["nodes"] = emb.size();
    } catch (const std::exception& e) {
      out["status"] = "failed";
      out["error"] = e.what();
    }
    return {200, out};
  }

  static void check_revision(const Session& s, const json& body) {
    if (!body.contains("revision")) return;
    const auto want = body["revision"].get<std::uint64_t>();
    if (want != s.revision) {
      throw Error(ErrorCode::StaleRevision, "revision " + std::to_string(want) + " is stale; session is at " +
                                                std::to_string(s.revision));
    }
  }

  static const Graph& require_graph(const Session& s) {
    if (!s.graph) throw Error(ErrorCode::InvalidArgument, "session has no graph");
    return *s.graph;
  }

  static const Structure& require_exemplar(const Session& s) {
    if (!s.exemplar) throw Error(ErrorCode::InvalidArgument, "session has no exemplar");
    return *s.exemplar;
  }

  void load_graph(Session& s, const json& body) {
    if (!s.history.empty()) {
      throw Error(ErrorCode::InvalidArgument, "session already has committed history; create a new session");
    }
    Graph g = graph_from_json(body.contains("graph") ? body["graph"] : body);
    if (g.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
    s.graph = std::move(g);
    s.exemplar.reset();
    s.exemplar_layout.reset();
    s.targets.clear();
    s.pending.clear();
    s.embed_job = start_embedding(s);
  }

  std::string start_embedding(const Session& s) {
    auto job = std::make_shared<Job>();
    job->session = s.id;
    const auto cfg = s.config;
    job->result = std::async(std::launch::async, [g = *s.graph, cfg] {
                    return cached_embeddings(g, cfg.embedding, cfg.embedding_cache);
                  }).share();
    std::lock_guard lock(mu_);
    job->id = "j" + std::to_string(++next_job_);
    jobs_[job->id] = job;
    return job->id;
  }

  // Embeddings depend on topology only, so a job started at graph load stays
  // valid across commits and undo. A session restored from disk has none.
  EmbeddingSet embeddings(Session& s) {
    if (s.embed_job) {
      std::lock_guard lock(mu_);
      if (!jobs_.count(*s.embed_job)) s.embed_job.reset();
    }
    if (!s.embed_job) s.embed_job = start_embedding(s);
    return find_job(*s.embed_job)->result.get();
  }

  static void select_exemplar(Session& s, const json& body) {
    const auto& g = require_graph(s);
    Structure ex = structure_from_json(body.contains("structure") ? body["structure"] : body);
    const auto members = resolve(g, ex);
    s.exemplar = ex;
    s.exemplar_layout = induced_subgraph(g, members);
    s.targets.clear();
    s.pending.clear();
  }

  static void move_exemplar_nodes(Session& s, const json& body) {
    require_exemplar(s);
    auto pts = s.exemplar_layout->positions();
    for (const auto& n : detail::array_field(body, "positions")) {
      const auto k = s.exemplar_layout->index_of(detail::string_field(n, "id"));
      if (!k) throw Error(ErrorCode::UnknownNode, "node '" + detail::string_field(n, "id") + "' is not in the exemplar");
      pts[*k] = {detail::number_field(n, "x"), detail::number_field(n, "y")};
    }
    s.exemplar_layout = s.exemplar_layout->with_positions(pts);
  }

  void retrieve(Session& s, const json& body) {
    const auto& g = require_graph(s);
    s.pending.clear();
    s.targets.clear();
    if (body.contains("structures")) {
      for (const auto& st : detail::array_field(body, "structures")) {
        auto t = structure_from_json(st);
        resolve(g, t);
        s.targets.push_back({std::move(t), 0.0});
      }
      return;
    }
    const auto& ex = require_exemplar(s);
    auto params = s.config.retrieval;
    if (body.contains("epsilon")) params.epsilon = body["epsilon"].get<double>();
    if (body.contains("k")) params.k = body["k"].get<int>();
    s.targets = retrieve_similar(g, ex, embeddings(s), params);
  }

  static void copy(Session& s, const json& body) {
    const auto& g = require_graph(s);
    const auto& ex = require_exemplar(s);
    Clipboard c{induced_subgraph(g, resolve(g, ex)), *s.exemplar_layout, {}};
    if (body.contains("markers")) c.markers.pairs = pairs_from_json({{"pairs", body["markers"]}});
    s.clipboard = std::move(c);
  }

  static Proposal paste(Session& s, const std::string& index, const json& body) {
    if (!s.clipboard) throw Error(ErrorCode::EmptyClipboard, "no recorded modification");
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoul(index, &used);
      if (used != index.size()) throw std::invalid_argument(index);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "target index must be a non-negative integer");
    }
    if (k >= s.targets.size()) throw Error(ErrorCode::NotFound, "no target " + index);
    const auto& g = require_graph(s);
    const auto& clip = *s.clipboard;
    Proposal p;
    p.target = s.targets[k].structure;
    const auto target = induced_subgraph(g, resolve(g, p.target));
    if (body.contains("markers")) {
      p.markers.pairs = pairs_from_json({{"pairs", body["markers"]}});
    } else if (clip.markers.size() >= 2 && fits(clip.markers, clip.source, target)) {
      p.markers = clip.markers;
    } else {
      p.markers = auto_markers(clip.source, target, s.config);
    }
    const auto res = transfer_modification(clip.source, clip.modified, target, p.markers, s.config.deform, s.config.match);
    p.layout = res.layout;
    p.markers = res.markers;
    p.rounds = res.rounds;
    s.pending[k] = p;
    return p;
  }

  static bool fits(const MarkerSet& m, const Graph& source, const Graph& target) {
    for (const auto& pr : m.pairs) {
      if (!source.contains(pr.source) || !target.contains(pr.target)) return false;
    }
    return true;
  }

  static void commit(Session& s, const json& body) {
    const auto& g = require_graph(s);
    std::vector<ModifiedStructure> items;
    const bool with_exemplar = body.value("exemplar", false);
    if (with_exemplar) items.push_back({require_exemplar(s), *s.exemplar_layout});
    for (const auto& [k, p] : s.pending) items.push_back({p.target, p.layout});
    if (items.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to commit");
    std::vector<char> taken(g.size(), 0);
    for (const auto& it : items) {
      for (const auto v : resolve(g, it.structure)) {
        if (taken[v]) throw Error(ErrorCode::InvalidArgument, "committed structures share node '" + g.id(v) + "'");
        taken[v] = 1;
      }
    }
    MergeParams mp = s.config.merge;
    mp.deform = s.config.deform;
    HistoryEntry h{{}, g, merge_all(g, items, mp)};
    for (const auto& it : items) h.structures.push_back(it.structure);
    s.graph = h.after;
    s.history.push_back(std::move(h));
    s.cursor = s.history.size();
    s.pending.clear();
    if (s.exemplar) s.exemplar_layout = induced_subgraph(*s.graph, resolve(*s.graph, *s.exemplar));
  }

  static void undo(Session& s) {
    if (s.cursor == 0) throw Error(ErrorCode::InvalidArgument, "nothing to undo");
    s.graph = s.history[--s.cursor].before;
    s.pending.clear();
    if (s.exemplar) s.exemplar_layout = induced_subgraph(*s.graph, resolve(*s.graph, *s.exemplar));
  }

  static void redo(Session& s) {
    if (s.cursor == s.history.size()) throw Error(ErrorCode::InvalidArgument, "nothing to redo");
    s.graph = s.history[s.cursor++].after;
    s.pending.clear();
    if (s.exemplar) s.exemplar_layout = induced_subgraph(*s.graph, resolve(*s.graph, *s.exemplar));
  }

  static json targets_json(const Session& s) {
    json out = json::array();
    for (std::size_t k = 0; k < s.targets.size(); ++k) {
      out.push_back({{"index", k}, {"nodes", s.targets[k].structure.nodes}, {"similarity", s.targets[k].similarity}});
    }
    return out;
  }

  // Newest first, each entry with the before and after layouts of the
  // structures it touched.
  static json history_json(const Session& s) {
    json entries = json::array();
    for (std::size_t k = s.history.size(); k-- > 0;) {
      const auto& h = s.history[k];
      json structures = json::array();
      for (const auto& st : h.structures) {
        structures.push_back({{"nodes", st.nodes},
                              {"before", graph_to_json(induced_subgraph(h.before, resolve(h.before, st)))},
                              {"after", graph_to_json(induced_subgraph(h.after, resolve(h.after, st)))}});
      }
      entries.push_back({{"index", k}, {"applied", k < s.cursor}, {"structures", structures}});
    }
    return {{"entries", entries}, {"cursor", s.cursor}, {"revision", s.revision}};
  }

  std::string snapshot_path(const std::string& id) const { return (std::filesystem::path(opts_.store_dir) / (id + ".json")).string(); }

  void persist(const Session& s) const {
    if (opts_.store_dir.empty()) return;
    const auto path = snapshot_path(s.id);
    const auto tmp = path + ".tmp";
    write_file(tmp, session_to_json(s).dump());
    std::filesystem::rename(tmp, path);
  }

  Options opts_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t next_session_ = 0;
  std::uint64_t next_job_ = 0;
};

}  // namespace graphtune
