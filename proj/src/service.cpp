#include "anigreen/service.hpp"

#include "anigreen/coords.hpp"
#include "anigreen/scene.hpp"
#include "anigreen/variational.hpp"

#include <chrono>
#include <condition_variable>
#include <future>
#include <optional>
#include <sstream>

namespace anigreen {

using nlohmann::json;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <int D>
struct State {
  SceneData<D> scene;
  std::unique_ptr<KernelContext<D>> ctx;
  CoordinateTable<D> table;
};

template <class T>
struct state_dim;
template <int D>
struct state_dim<State<D>> {
  static constexpr int value = D;
};

template <int D>
double partition_residual(const CoordinateTable<D>& t) {
  if (t.phi.rows() == 0) return 0.0;
  return (t.phi.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

template <int D>
void rebuild(State<D>& st) {
  st.ctx = std::make_unique<KernelContext<D>>(st.scene.matrix, st.scene.source);
  st.table = compute_coords(*st.ctx, st.scene.object_vertices, st.scene.policy());
}

std::string message_type(const json& msg) {
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    throw Error(ErrorCode::ParseError, "message needs a string \"type\" field");
  return msg["type"].get<std::string>();
}

void echo_seq(const json& msg, json& out) {
  if (msg.is_object() && msg.contains("seq")) out["seq"] = msg["seq"];
}

}  // namespace

int http_status(ErrorCode code) {
  if (code == ErrorCode::UnknownSession) return 404;
  return is_numerical(code) ? 500 : 400;
}

json error_message(const Error& e) {
  json j{{"type", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.what()},
         {"status", http_status(e.code())}};
  if (!e.indices().empty()) j["indices"] = e.indices();
  return j;
}

struct SessionImpl {
  explicit SessionImpl(std::variant<State<2>, State<3>> s) : state(std::move(s)) {}

  std::string id;
  std::variant<State<2>, State<3>> state;
  std::uint64_t revision = 0;

  // Single-writer discipline: one compute at a time, one queued cage_update.
  std::mutex mu;
  std::condition_variable cv;
  bool busy = false;
  struct Pending {
    json message;
    std::promise<std::vector<json>> reply;
  };
  std::unique_ptr<Pending> pending;

  int dim() const { return state.index() == 0 ? 2 : 3; }

  json info() const {
    return std::visit(
        [&](const auto& st) {
          constexpr int D = state_dim<std::decay_t<decltype(st)>>::value;
          return json{{"id", id},
                      {"dim", D},
                      {"revision", revision},
                      {"n_vertices", st.scene.source.num_vertices()},
                      {"n_faces", st.scene.source.num_faces()},
                      {"n_object_vertices", st.scene.object_vertices.size()},
                      {"matrix", matrix_spec_to_json<D>(st.scene.matrix_spec)},
                      {"partition_residual", partition_residual(st.table)}};
        },
        state);
  }

  // Runs one message; caller holds the busy flag, not the mutex.
  std::vector<json> execute(const json& msg) {
    std::vector<json> out;
    try {
      const std::string type = message_type(msg);
      if (type == "cage_update")
        out.push_back(cage_update(msg));
      else if (type == "set_matrix")
        out.push_back(set_matrix(msg));
      else if (type == "var_solve")
        out.push_back(var_solve(msg));
      else if (type == "invalid")
        throw Error(ErrorCode::ParseError, "line " + std::to_string(msg.value("line", 0)) + ": " +
                                               msg.value("error", std::string("bad json")));
      else
        throw Error(ErrorCode::ParseError, "unknown message type \"" + type + "\"");
    } catch (const Error& e) {
      out.push_back(error_message(e));
    } catch (const json::exception& e) {
      out.push_back(error_message(Error(ErrorCode::ParseError, e.what())));
    }
    for (auto& o : out) echo_seq(msg, o);
    return out;
  }

  json cage_update(const json& msg) {
    return std::visit(
        [&](auto& st) {
          constexpr int D = state_dim<std::decay_t<decltype(st)>>::value;
          if (!msg.contains("vertices")) throw Error(ErrorCode::ParseError, "cage_update needs \"vertices\"");
          PointList<D> verts = points_from_flat_json<D>(msg["vertices"], "vertices");
          bool use_scale = msg.contains("use_scale") ? msg["use_scale"].get<bool>() : st.scene.use_scale;
          auto pair = make_cage_pair(st.scene.source, std::move(verts));
          PointList<D> out = deform(st.table, pair, st.scene.matrix, use_scale);
          ++revision;
          return json{{"type", "deformed"}, {"revision", revision}, {"vertices", points_to_flat_json<D>(out)}};
        },
        state);
  }

  json set_matrix(const json& msg) {
    auto t0 = std::chrono::steady_clock::now();
    return std::visit(
        [&](auto& st) {
          constexpr int D = state_dim<std::decay_t<decltype(st)>>::value;
          if (!msg.contains("matrix")) throw Error(ErrorCode::ParseError, "set_matrix needs \"matrix\"");
          MatrixSpec<D> spec = matrix_spec_from_json<D>(msg["matrix"]);
          SpdMatrix<D> a = build_matrix(spec);
          // Build aside so a failure leaves the session untouched.
          State<D> next{st.scene, nullptr, {}};
          next.scene.matrix_spec = spec;
          next.scene.matrix = a;
          rebuild(next);
          st = std::move(next);
          ++revision;
          return json{{"type", "progress"},
                      {"stage", "precompute"},
                      {"revision", revision},
                      {"elapsed_ms", elapsed_ms(t0)},
                      {"partition_residual", partition_residual(st.table)}};
        },
        state);
  }

  json var_solve(const json& msg) {
    return std::visit(
        [&](auto& st) {
          constexpr int D = state_dim<std::decay_t<decltype(st)>>::value;
          // Reuse the scene parser for the variational block.
          json block = msg;
          block.erase("type");
          block.erase("seq");
          json scene = scene_to_json(Scene{st.scene});
          json merged = scene.contains("variational") ? scene["variational"] : json::object();
          for (auto it = block.begin(); it != block.end(); ++it) merged[it.key()] = it.value();
          scene["variational"] = merged;
          Scene parsed = parse_scene_json(scene);
          const auto& data = std::get<SceneData<D>>(parsed.data);

          VariationalSolver<D> solver(data.variational_problem());
          VariationalState<D> res = solver.solve();
          const auto& tr = res.energy_trace;
          for (std::size_t k = 1; k < tr.size(); ++k)
            if (tr[k] > tr[k - 1] * (1 + 1e-12) + 1e-300)
              throw Error(ErrorCode::NumericalFailure,
                          "energy trace increased at step " + std::to_string(k), {k});
          PointList<D> out = apply_coefficients(st.table, res.a, res.b);
          ++revision;
          json a = json::array(), b = json::array();
          for (Eigen::Index i = 0; i < res.a.rows(); ++i)
            for (int k = 0; k < D; ++k) a.push_back(res.a(i, k));
          for (Eigen::Index i = 0; i < res.b.rows(); ++i)
            for (int k = 0; k < D; ++k) b.push_back(res.b(i, k));
          return json{{"type", "deformed"},
                      {"revision", revision},
                      {"vertices", points_to_flat_json<D>(out)},
                      {"energy_trace", tr},
                      {"iterations", res.iterations},
                      {"converged", res.converged},
                      {"coefficients", {{"a", a}, {"b", b}}}};
        },
        state);
  }

  std::vector<json> submit(const json& msg) {
    const bool is_update = msg.is_object() && msg.value("type", "") == "cage_update";
    std::unique_lock<std::mutex> lock(mu);
    if (busy && is_update) {
      // Queue behind the running compute; a newer update replaces this one.
      if (pending) {
        json note{{"type", "progress"}, {"stage", "superseded"}, {"revision", revision}};
        echo_seq(pending->message, note);
        pending->reply.set_value({note});
      }
      pending = std::make_unique<Pending>();
      pending->message = msg;
      auto fut = pending->reply.get_future();
      lock.unlock();
      return fut.get();
    }
    cv.wait(lock, [&] { return !busy; });
    busy = true;
    lock.unlock();
    std::vector<json> result = execute(msg);
    lock.lock();
    while (pending) {
      auto next = std::move(pending);
      lock.unlock();
      next->reply.set_value(execute(next->message));
      lock.lock();
    }
    busy = false;
    lock.unlock();
    cv.notify_all();
    return result;
  }
};

SessionManager::SessionManager() = default;
SessionManager::~SessionManager() = default;

json SessionManager::create(const json& scene_json, const std::string& base_dir) {
  auto t0 = std::chrono::steady_clock::now();
  Scene scene = parse_scene_json(scene_json, base_dir);
  std::shared_ptr<SessionImpl> impl;
  if (scene.dim() == 2) {
    State<2> st{std::get<SceneData<2>>(scene.data), nullptr, {}};
    rebuild(st);
    impl = std::make_shared<SessionImpl>(std::move(st));
  } else {
    State<3> st{std::get<SceneData<3>>(scene.data), nullptr, {}};
    rebuild(st);
    impl = std::make_shared<SessionImpl>(std::move(st));
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    impl->id = "s" + std::to_string(next_id_++);
    sessions_[impl->id] = impl;
  }
  json j = impl->info();
  j["precompute_ms"] = elapsed_ms(t0);
  return j;
}

bool SessionManager::destroy(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.erase(id) > 0;
}

std::shared_ptr<SessionImpl> SessionManager::find(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
  return it->second;
}

json SessionManager::info(const std::string& id) const {
  auto s = find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  return s->info();
}

std::size_t SessionManager::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

std::vector<json> SessionManager::handle(const std::string& id, const json& message) {
  return find(id)->submit(message);
}

std::vector<json> SessionManager::handle_batch(const std::string& id, const std::vector<json>& messages) {
  auto s = find(id);
  std::vector<json> out;
  auto is_update = [](const json& m) { return m.is_object() && m.value("type", "") == "cage_update"; };
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (is_update(messages[i]) && i + 1 < messages.size() && is_update(messages[i + 1])) {
      json note{{"type", "progress"}, {"stage", "superseded"}};
      echo_seq(messages[i], note);
      out.push_back(note);
      continue;
    }
    for (auto& r : s->submit(messages[i])) out.push_back(std::move(r));
  }
  return out;
}

std::string SessionManager::handle_stream(const std::string& id, const std::string& ndjson) {
  std::vector<json> msgs;
  std::istringstream in(ndjson);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      msgs.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      msgs.push_back(json{{"type", "invalid"}, {"line", lineno}, {"error", e.what()}});
    }
  }
  std::string out;
  for (const auto& r : handle_batch(id, msgs)) out += r.dump() + "\n";
  return out;
}

}  // namespace anigreen
