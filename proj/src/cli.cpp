#include "anigreen/cli.hpp"

#include "anigreen/coords.hpp"
#include "anigreen/distortion.hpp"
#include "anigreen/obj_io.hpp"
#include "anigreen/quadrature.hpp"
#include "anigreen/scene.hpp"
#include "anigreen/service.hpp"
#include "anigreen/table_cache.hpp"
#include "anigreen/variational.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

namespace anigreen {

using nlohmann::json;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <int D>
std::string geometry_text(const std::string& path, const PointList<D>& pts, const std::vector<std::vector<int>>& faces) {
  if (ends_with(path, ".obj")) {
    PointList<3> p3;
    p3.reserve(pts.size());
    for (const auto& p : pts) {
      Vec<3> q = Vec<3>::Zero();
      q.template head<D>() = p;
      p3.push_back(q);
    }
    return format_obj(p3, faces);
  }
  if (ends_with(path, ".json")) {
    json j{{"dim", D}, {"vertices", points_to_flat_json<D>(pts)}, {"faces", faces}};
    return j.dump(2) + "\n";
  }
  throw Error(ErrorCode::InvalidArgument, "output '" + path + "' must end in .obj or .json");
}

json matrix_json(const RowMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

template <int D>
json report_json(const DistortionReport<D>& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    json jac = json::array();
    for (int i = 0; i < D; ++i)
      for (int k = 0; k < D; ++k) jac.push_back(s.jacobian(i, k));
    json point = json::array();
    for (int k = 0; k < D; ++k) point.push_back(s.point(k));
    samples.push_back({{"point", point}, {"jacobian", jac}, {"iso", s.iso}, {"area", s.area}});
  }
  return json{{"matrix", matrix_spec_to_json<D>(r.config)},
              {"baseline", r.baseline},
              {"mean_iso", r.mean_iso},
              {"mean_area", r.mean_area},
              {"samples", samples}};
}

template <int D>
CoordinateTable<D> load_or_compute(const SceneData<D>& s, const std::string& table_path) {
  if (!table_path.empty()) {
    AnyTable any = read_table(table_path);
    if (!std::holds_alternative<CoordinateTable<D>>(any))
      throw Error(ErrorCode::ConnectivityMismatch, "table cache dimension does not match the scene");
    CoordinateTable<D> t = std::get<CoordinateTable<D>>(std::move(any));
    // The cache stores no ids; rebind after checking the shape.
    if (t.points.size() != s.object_vertices.size() || static_cast<std::size_t>(t.phi.cols()) != s.source.num_vertices() ||
        static_cast<std::size_t>(t.psi.cols()) != s.source.num_faces())
      throw Error(ErrorCode::ConnectivityMismatch, "table cache shape does not match the scene");
    t.cage_id = s.source.id();
    t.matrix_id = matrix_id(s.matrix);
    return t;
  }
  return compute_coords(s.source, s.matrix, s.object_vertices, s.policy());
}

template <int D>
int cmd_coords(const SceneData<D>& s, const std::string& out_path, std::ostream& out) {
  CoordinateTable<D> t = compute_coords(s.source, s.matrix, s.object_vertices, s.policy());
  write_table(out_path, t);
  out << "wrote " << out_path << ": " << t.points.size() << " points, " << s.source.num_vertices() << " vertices, "
      << s.source.num_faces() << " faces\n";
  return 0;
}

template <int D>
int cmd_deform(const SceneData<D>& s, const std::string& out_path, const std::string& table_path,
               std::optional<bool> use_scale, std::ostream& out) {
  CoordinateTable<D> t = load_or_compute(s, table_path);
  PointList<D> def = deform(t, s.pair(), s.matrix, use_scale.value_or(s.use_scale));
  write_text_file(out_path, geometry_text<D>(out_path, def, s.object_faces));
  out << "wrote " << out_path << ": " << def.size() << " vertices\n";
  return 0;
}

template <int D>
int cmd_varsolve(const SceneData<D>& s, const std::string& out_path, const std::string& mesh_path,
                 std::ostream& out) {
  if (!s.variational) throw Error(ErrorCode::InvalidArgument, "scene has no \"variational\" block");
  VariationalSolver<D> solver(s.variational_problem());
  VariationalState<D> st = solver.solve();
  PointList<D> def = apply_coefficients(compute_coords(s.source, s.matrix, s.object_vertices, s.policy()), st.a, st.b);
  json j{{"dim", D},
         {"a", matrix_json(st.a)},
         {"b", matrix_json(st.b)},
         {"energy_trace", st.energy_trace},
         {"iterations", st.iterations},
         {"converged", st.converged},
         {"vertices", points_to_flat_json<D>(def)}};
  write_text_file(out_path, j.dump(2) + "\n");
  if (!mesh_path.empty()) write_text_file(mesh_path, geometry_text<D>(mesh_path, def, s.object_faces));
  out << "wrote " << out_path << ": " << st.iterations << " iterations, final energy "
      << (st.energy_trace.empty() ? 0.0 : st.energy_trace.back()) << (st.converged ? "" : " (not converged)") << "\n";
  return 0;
}

template <int D>
int cmd_validate(const SceneData<D>& s, std::size_t samples, double tol, std::optional<std::uint64_t> seed,
                 double quad_tol, std::ostream& out, std::ostream& err) {
  PointList<D> pts = sample_interior_points(s.source, samples, seed.value_or(s.seed));
  KernelContext<D> ctx(s.matrix, s.source);
  OracleReport r = compare_with_oracle(ctx, pts, quad_tol);
  char line[256];
  std::snprintf(line, sizeof line, "max relative error %.3e (psi %.3e, phi %.3e) over %zu values at %zu points\n",
                r.max_rel_error, r.max_psi_error, r.max_phi_error, r.values, pts.size());
  out << line;
  if (r.max_rel_error > tol) {
    std::snprintf(line, sizeof line, "max relative error %.3e exceeds %.3e at point %zu face %zu", r.max_rel_error,
                  tol, r.worst_point, r.worst_face);
    err << "ERROR " << to_string(ErrorCode::NumericalFailure) << ": " << line << "\n";
    return 2;
  }
  return 0;
}

template <int D>
int cmd_metrics(const SceneData<D>& s, const std::string& out_path, std::ostream& out) {
  auto reports = sweep(s.pair(), {s.matrix_spec}, s.object_vertices, s.use_scale, s.policy());
  json j{{"dim", D},
         {"definitions", {{"iso", kIsoDistortionDefinition}, {"area", kAreaDistortionDefinition}}},
         {"reports", json::array()}};
  for (const auto& r : reports) j["reports"].push_back(report_json(r));
  write_text_file(out_path, j.dump(2) + "\n");
  for (const auto& r : reports)
    out << (r.baseline ? "identity" : "scene   ") << " mean_iso " << r.mean_iso << " mean_area " << r.mean_area << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cage deformation with anisotropic Green coordinates", "anigreen"};
  app.require_subcommand(1);

  std::string scene_path, out_path, table_path, mesh_path, host = "127.0.0.1";
  std::size_t samples = 100;
  double tol = 1e-6, quad_tol = 1e-12;
  std::optional<std::uint64_t> seed;
  std::optional<bool> use_scale;
  int port = 8080;

  auto* coords = app.add_subcommand("coords", "precompute the coordinate table cache (.agc)");
  coords->add_option("scene", scene_path, "scene file")->required();
  coords->add_option("--out,-o", out_path, "table cache path")->required();

  auto* def = app.add_subcommand("deform", "deform the scene object by the target cage");
  def->add_option("scene", scene_path, "scene file")->required();
  def->add_option("--out,-o", out_path, "output .obj or .json")->required();
  def->add_option("--table", table_path, "reuse a table cache");
  def->add_option("--use-scale", use_scale, "override the scene's use_scale");

  auto* var = app.add_subcommand("varsolve", "solve the variational problem in the scene");
  var->add_option("scene", scene_path, "scene file")->required();
  var->add_option("--out,-o", out_path, "coefficients and energy trace (.json)")->required();
  var->add_option("--mesh", mesh_path, "also write the deformed object (.obj or .json)");

  auto* val = app.add_subcommand("validate", "compare closed forms against quadrature");
  val->add_option("scene", scene_path, "scene file")->required();
  val->add_option("--samples", samples, "interior sample count")->check(CLI::PositiveNumber);
  val->add_option("--tol", tol, "relative error tolerance")->check(CLI::PositiveNumber);
  val->add_option("--seed", seed, "sampling seed (default: scene seed)");
  val->add_option("--quad-tol", quad_tol, "quadrature relative tolerance");

  auto* met = app.add_subcommand("metrics", "distortion report against the identity baseline");
  met->add_option("scene", scene_path, "scene file")->required();
  met->add_option("--out,-o", out_path, "report (.json)")->required();

  auto* srv = app.add_subcommand("serve", "run the deformation service");
  srv->add_option("--host", host, "bind address");
  srv->add_option("--port", port, "port (0 picks a free one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ERROR " << to_string(ErrorCode::ParseError) << ": " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    if (srv->parsed()) {
      SessionManager sessions;
      HttpServer server(sessions);
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
      out << "listening on " << host << ":" << bound << std::endl;
      return server.listen() ? 0 : 1;
    }
    Scene scene = parse_scene(scene_path);
    return std::visit(
        [&](const auto& s) -> int {
          constexpr int D = std::decay_t<decltype(s.source.vertices())>::value_type::RowsAtCompileTime;
          if (coords->parsed()) return cmd_coords<D>(s, out_path, out);
          if (def->parsed()) return cmd_deform<D>(s, out_path, table_path, use_scale, out);
          if (var->parsed()) return cmd_varsolve<D>(s, out_path, mesh_path, out);
          if (val->parsed()) return cmd_validate<D>(s, samples, tol, seed, quad_tol, out, err);
          return cmd_metrics<D>(s, out_path, out);
        },
        scene.data);
  } catch (const Error& e) {
    err << "ERROR " << to_string(e.code()) << ": " << e.what();
    if (!e.indices().empty()) {
      err << " [indices";
      for (auto i : e.indices()) err << " " << i;
      err << "]";
    }
    err << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "ERROR " << to_string(ErrorCode::InvalidArgument) << ": " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace anigreen
