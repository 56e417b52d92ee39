#include "delone/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "delone/constants.hpp"
#include "delone/errors.hpp"
#include "delone/io.hpp"
#include "delone/netsynth.hpp"
#include "delone/svg.hpp"

namespace delone {

namespace {

void log(const std::string& msg) { std::cerr << "[delone] " << msg << '\n'; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError(what + ": not a number: " + s);
  }
  if (used != s.size()) throw ValidationError(what + ": not a number: " + s);
  return v;
}

Region parse_region(const std::string& spec, int dim) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ValidationError("region: expected box:... or disk:...");
  const std::string kind = spec.substr(0, colon);
  Vector v;
  for (const auto& t : split(spec.substr(colon + 1), ',')) v.push_back(to_real(t, "region"));
  if (kind == "box") {
    if (v.size() != 2 * static_cast<std::size_t>(dim)) throw ValidationError("region: box needs 2*dim numbers");
    return Region::box(Vector(v.begin(), v.begin() + dim), Vector(v.begin() + dim, v.end()));
  }
  if (kind == "disk") {
    if (v.size() != static_cast<std::size_t>(dim) + 1) throw ValidationError("region: disk needs dim+1 numbers");
    return Region::disk(Vector(v.begin(), v.begin() + dim), v.back());
  }
  throw ValidationError("region: unknown kind " + kind);
}

void require_input(const std::string& path, const std::string& flag) {
  if (path.empty()) throw ValidationError(flag + ": required");
  if (!std::filesystem::is_regular_file(path)) throw IoError(path + ": no such file");
}

void require_output(const std::string& path, const std::string& flag) {
  if (path.empty()) throw ValidationError(flag + ": required");
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) throw IoError(path + ": directory does not exist");
}

MetricModel metric_for(const RunConfig& cfg, int dim) {
  const MetricModel m = MetricModel::parse(cfg.metric.empty() ? "flat:" + std::to_string(dim) : cfg.metric);
  if (m.leaf_dim() != dim) throw ValidationError("metric: leaf dimension differs from input dimension");
  return m;
}

std::size_t central_interior_vertex(const Net& net) {
  const Vector c = scale(add(net.region.bbox_lo(), net.region.bbox_hi()), 0.5);
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    const double d = dist(net.points[i], c);
    if (is_interior(net, i) && d < bd) bd = d, best = i;
  }
  return best;
}

ParamFamily family_for(const RunConfig& cfg, const Net& net, const ConstantBundle& b) {
  const auto colon = cfg.family.find(':');
  if (colon == std::string::npos) throw ValidationError("family: expected kind:arg");
  const std::string kind = cfg.family.substr(0, colon), arg = cfg.family.substr(colon + 1);
  if (kind == "file") {
    ParamFamily f = family_from_json(read_json_file(arg));
    for (const auto& [p, disp] : f.fields)
      if (disp.size() != net.points.size()) throw ValidationError("family.fields." + p + ": size differs from net");
    return f;
  }
  const double depth = to_real(arg, "family");
  if (depth != std::floor(depth)) throw ValidationError("family: depth must be an integer");
  const int k = static_cast<int>(depth);
  if (kind == "smooth") return make_family(net, k, b.eps0 * b.rF, cfg.seed);
  if (kind == "identity") return make_family(net, k, 0.0, cfg.seed);
  if (kind == "adversarial") return make_adversarial_family(net, k, central_interior_vertex(net), 10.0 * b.d1());
  throw ValidationError("family: unknown kind " + kind);
}

int cmd_constants(const RunConfig& cfg) {
  require_output(cfg.out_path, "--out");
  BundleRequest r;
  r.n = cfg.dim;
  r.mode = cfg.mode;
  r.metric = cfg.metric;
  r.dFU = cfg.dFU;
  r.lF = cfg.lF;
  r.seed = cfg.seed;
  if (!cfg.eps.empty()) {
    if (cfg.eps.size() != 5) throw ValidationError("--eps: expected eps0,eps1,eps2,eps3,eps4");
    std::optional<double>* slots[5] = {&r.eps0, &r.eps1, &r.eps2, &r.eps3, &r.eps4};
    for (int i = 0; i < 5; ++i)
      if (cfg.eps[i] != "auto") *slots[i] = to_real(cfg.eps[i], "--eps[" + std::to_string(i) + "]");
  }
  const ConstantBundle b = make_bundle(r);
  write_json_file(cfg.out_path, bundle_to_json(b));
  log("constants: n=" + std::to_string(b.n) + " mode=" + b.mode + " -> " + cfg.out_path);
  return kExitOk;
}

int cmd_synthesize(const RunConfig& cfg) {
  require_input(cfg.bundle_path, "--bundle");
  require_output(cfg.out_path, "--out");
  const ConstantBundle b = bundle_from_json(read_json_file(cfg.bundle_path));
  if (cfg.region.empty()) throw ValidationError("--region: required");
  const Region K = parse_region(cfg.region, b.n);
  const SynthesisResult res = synthesize_net(K, b, cfg.seed);
  write_json_file(cfg.out_path, net_to_json(res.net));
  log("synthesize: " + std::to_string(res.net.points.size()) + " points -> " + cfg.out_path);
  return kExitOk;
}

int cmd_triangulate(const RunConfig& cfg) {
  require_input(cfg.net_path, "--net");
  require_output(cfg.out_path, "--out");
  const Json j = read_json_file(cfg.net_path);
  const MetricModel m = metric_for(cfg, j.value("dim", 0));
  const Net net = net_from_json(j, &m);
  const DelaunayComplex c = build_delaunay(net, m);
  write_json_file(cfg.out_path, complex_to_json(c));
  log("triangulate: " + std::to_string(c.top().size()) + " top simplices, regular=" +
      (c.regular ? "true" : "false") + " -> " + cfg.out_path);
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg) {
  require_input(cfg.net_path, "--net");
  require_input(cfg.complex_path, "--complex");
  require_input(cfg.bundle_path, "--bundle");
  require_output(cfg.out_path, "--out");
  if (!cfg.family_out_path.empty()) require_output(cfg.family_out_path, "--family-out");
  const ConstantBundle b = bundle_from_json(read_json_file(cfg.bundle_path));
  const MetricModel m = MetricModel::parse(b.metric);
  const Net net = net_from_json(read_json_file(cfg.net_path), &m);
  const DelaunayComplex c = complex_from_json(read_json_file(cfg.complex_path));
  if (c.dim != net.dim) throw ValidationError("complex.dim: differs from net.dim");
  if (!c.regular) throw ValidationError("complex.regular: certification requires a regular complex");
  const ParamFamily fam = family_for(cfg, net, b);
  if (!cfg.family_out_path.empty()) write_json_file(cfg.family_out_path, family_to_json(fam));
  const StabilityCertificate cert = certify_family_stability(net, c, fam, b, m);
  Json out = certificate_to_json(cert);
  out["r_star"] = compute_r_star(fam.transport(net, m), b.eps0, b.rF, fam.depth);
  write_json_file(cfg.out_path, out);
  log(std::string("certify: ") + (cert.pass ? "pass" : "FAIL") + " worst=" + cert.worst.quantity +
      " param=" + cert.worst.param + " -> " + cfg.out_path);
  return cert.pass ? kExitOk : kExitCertification;
}

int cmd_duality(const RunConfig& cfg) {
  require_input(cfg.net_path, "--net");
  require_input(cfg.complex_path, "--complex");
  if (!cfg.out_path.empty()) require_output(cfg.out_path, "--out");
  const Json j = read_json_file(cfg.net_path);
  const MetricModel m = metric_for(cfg, j.value("dim", 0));
  const Net net = net_from_json(j, &m);
  const DelaunayComplex c = complex_from_json(read_json_file(cfg.complex_path));
  const DualityReport r = check_duality(net, c, m);
  const Json out = duality_to_json(r);
  if (cfg.out_path.empty()) std::cout << out.dump(2) << '\n';
  else write_json_file(cfg.out_path, out);
  log("duality-check: " + std::to_string(r.violations.size()) + " violations");
  return r.ok() ? kExitOk : kExitCertification;
}

int cmd_render(const RunConfig& cfg) {
  require_input(cfg.net_path, "--net");
  require_input(cfg.complex_path, "--complex");
  if (!cfg.certificate_path.empty()) require_input(cfg.certificate_path, "--certificate");
  require_output(cfg.out_path, "--out");
  const Net net = net_from_json(read_json_file(cfg.net_path));
  const DelaunayComplex c = complex_from_json(read_json_file(cfg.complex_path));
  std::optional<StabilityCertificate> cert;
  if (!cfg.certificate_path.empty()) cert = certificate_from_json(read_json_file(cfg.certificate_path));
  SvgOptions opt;
  opt.circumcircles = cfg.circumcircles;
  write_text_file(cfg.out_path, render_svg(net, c, cert ? &*cert : nullptr, opt));
  log("render: -> " + cfg.out_path);
  return kExitOk;
}

}  // namespace

std::optional<int> parse_args(int argc, char** argv, RunConfig& cfg) {
  CLI::App app{"Delone nets, Delaunay complexes and stability certificates"};
  app.require_subcommand(1);
  auto* constants = app.add_subcommand("constants", "compute and validate a constant bundle");
  constants->add_option("--dim", cfg.dim, "leaf dimension n")->check(CLI::Range(1, 8));
  constants->add_option("--mode", cfg.mode, "paper | practical")->check(CLI::IsMember({"paper", "practical"}));
  constants->add_option("--metric", cfg.metric, "flat:n | sphere:R | torus:p1,p2");
  constants->add_option("--eps", cfg.eps, "eps0,eps1,eps2,eps3,eps4 (auto = computed)")->delimiter(',');
  constants->add_option("--dFU", cfg.dFU, "metric scale bound");
  constants->add_option("--lF", cfg.lF, "leafwise Lebesgue number (0 = unbounded)");
  constants->add_option("--seed", cfg.seed);
  constants->add_option("--out", cfg.out_path)->required();

  auto* synth = app.add_subcommand("synthesize", "build a net inside a region");
  synth->add_option("--bundle", cfg.bundle_path)->required();
  synth->add_option("--region", cfg.region, "box:lo..,hi.. | disk:c..,r")->required();
  synth->add_option("--seed", cfg.seed);
  synth->add_option("--out", cfg.out_path)->required();

  auto* tri = app.add_subcommand("triangulate", "Delaunay complex of a net");
  tri->add_option("--net", cfg.net_path)->required();
  tri->add_option("--metric", cfg.metric);
  tri->add_option("--out", cfg.out_path)->required();

  auto* cert = app.add_subcommand("certify", "family stability certificate");
  cert->add_option("--net", cfg.net_path)->required();
  cert->add_option("--complex", cfg.complex_path)->required();
  cert->add_option("--bundle", cfg.bundle_path)->required();
  cert->add_option("--family", cfg.family, "smooth:k | identity:k | adversarial:k | file:path");
  cert->add_option("--family-out", cfg.family_out_path);
  cert->add_option("--seed", cfg.seed);
  cert->add_option("--out", cfg.out_path)->required();

  auto* dual = app.add_subcommand("duality-check", "Voronoi/Delaunay duality audit");
  dual->add_option("--net", cfg.net_path)->required();
  dual->add_option("--complex", cfg.complex_path)->required();
  dual->add_option("--metric", cfg.metric);
  dual->add_option("--out", cfg.out_path);

  auto* render = app.add_subcommand("render", "SVG of a 2D net and complex");
  render->add_option("--net", cfg.net_path)->required();
  render->add_option("--complex", cfg.complex_path)->required();
  render->add_option("--certificate", cfg.certificate_path);
  render->add_flag("--circumcircles", cfg.circumcircles);
  render->add_option("--out", cfg.out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kExitValidation;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return std::nullopt;
}

int dispatch(const RunConfig& cfg) {
  try {
    if (cfg.command == "constants") return cmd_constants(cfg);
    if (cfg.command == "synthesize") return cmd_synthesize(cfg);
    if (cfg.command == "triangulate") return cmd_triangulate(cfg);
    if (cfg.command == "certify") return cmd_certify(cfg);
    if (cfg.command == "duality-check") return cmd_duality(cfg);
    if (cfg.command == "render") return cmd_render(cfg);
    log("unknown command: " + cfg.command);
    log("commands: constants synthesize triangulate certify duality-check render");
    return kExitValidation;
  } catch (const IoError& e) {
    log(std::string("io error: ") + e.what());
    return kExitIo;
  } catch (const Error& e) {
    log(std::string("error: ") + e.what());
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    log(std::string("error: ") + e.what());
    return kExitValidation;
  }
}

int run_cli(int argc, char** argv) {
  RunConfig cfg;
  if (auto code = parse_args(argc, argv, cfg)) return *code;
  return dispatch(cfg);
}

}  // namespace delone
