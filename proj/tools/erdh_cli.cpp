// erdh: embed, extract and benchmark ensemble reversible data hiding.

#include "erdh/bench.hpp"
#include "erdh/error.hpp"
#include "erdh/image.hpp"
#include "erdh/pipeline.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using namespace erdh;

std::optional<int> parse_grid(const std::string &text) {
  if (text == "auto" || text == "AUTO")
    return std::nullopt;
  const int m = std::stoi(text);
  if (m < 2 || m > 15)
    throw Error(ErrorCode::FieldOutOfRange, "--m must be auto or 2..15");
  return m;
}

std::vector<std::uint8_t> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string &path, const std::vector<std::uint8_t> &data) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char *>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out)
    throw Error(ErrorCode::IoFailure, "cannot write " + path);
}

std::string format_psnr(double v) {
  if (std::isinf(v))
    return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void write_layer_report(const std::string &path, const std::vector<LayerReport> &reports) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << "layer,m_used,pure_bits,side_info_bits,embedded_bits,psnr_db,mse,a0,a1,a2,a3,skipped\n";
  for (const LayerReport &r : reports) {
    out << int(r.layer_index) << ',' << r.m_used << ',' << r.pure_bits << ','
        << r.side_info_bits << ',' << r.embedded_bits << ',' << format_psnr(r.psnr_db)
        << ',' << r.mse;
    for (std::size_t c : r.alg_counts)
      out << ',' << c;
    out << ',' << r.skipped << '\n';
  }
}

std::vector<SweepMode> parse_modes(const std::string &list) {
  std::vector<SweepMode> modes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      modes.push_back(parse_mode(item));
  return modes;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Ensemble reversible data hiding"};
  app.require_subcommand(1);

  std::string cover_path, payload_path, out_path, report_path, grid = "auto";
  std::uint64_t seed = 1;
  int t_border = 1, layers = 1;
  auto *embed = app.add_subcommand("embed", "Hide a file in a PGM cover");
  embed->add_option("--cover", cover_path)->required();
  embed->add_option("--payload", payload_path)->required();
  embed->add_option("--seed", seed);
  embed->add_option("--m", grid, "grid side or auto");
  embed->add_option("--t", t_border);
  embed->add_option("--layers", layers);
  embed->add_option("--out", out_path)->required();
  embed->add_option("--report", report_path);

  std::string marked_path, out_cover, out_payload;
  auto *extract = app.add_subcommand("extract", "Recover cover and payload");
  extract->add_option("--marked", marked_path)->required();
  extract->add_option("--out-cover", out_cover)->required();
  extract->add_option("--out-payload", out_payload)->required();

  std::string modes = "ensemble,a0,a1,a2,a3", csv_path, name;
  bool verify = false;
  auto *sweep = app.add_subcommand("sweep", "Rate-distortion sweep");
  sweep->add_option("--cover", cover_path)->required();
  sweep->add_option("--layers", layers);
  sweep->add_option("--modes", modes);
  sweep->add_option("--seed", seed);
  sweep->add_option("--m", grid);
  sweep->add_option("--t", t_border);
  sweep->add_option("--name", name, "image name column (default: file stem)");
  sweep->add_option("--csv", csv_path)->required();
  sweep->add_flag("--verify", verify, "extract after each layer");

  int layer = 1;
  auto *algmap = app.add_subcommand("algmap", "Render the per-block algorithm choice");
  algmap->add_option("--cover", cover_path)->required();
  algmap->add_option("--layer", layer);
  algmap->add_option("--seed", seed);
  algmap->add_option("--m", grid);
  algmap->add_option("--t", t_border);
  algmap->add_option("--out", out_path, "output stem; writes <stem>.pgm and <stem>.txt")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*embed) {
      const GrayImage cover = load_pgm(cover_path);
      LayerConfig cfg;
      cfg.t_border = t_border;
      cfg.m_grid = parse_grid(grid);
      cfg.perm_seed = seed;
      const BitVector payload = BitVector::from_bytes(read_file(payload_path));
      const MessageResult res = embed_message(cover, payload, cfg, layers);
      store_pgm(res.marked, out_path);
      if (!report_path.empty())
        write_layer_report(report_path, res.reports);
      std::cout << "embedded " << payload.size() << " bits in " << res.reports.size()
                << " layer(s), PSNR " << format_psnr(psnr(cover, [&] {
                     GrayImage g = res.marked;
                     for (std::size_t i = 1; i < res.reports.size(); ++i)
                       g = rotate270(g);
                     return g;
                   }())) << " dB\n";
    } else if (*extract) {
      const MessageExtraction res = extract_message(load_pgm(marked_path));
      store_pgm(res.original, out_cover);
      write_file(out_payload, res.payload.to_bytes());
      std::cout << "recovered " << res.payload.size() << " bits from "
                << res.reports.size() << " layer(s)\n";
    } else if (*sweep) {
      const GrayImage cover = load_pgm(cover_path);
      SweepOptions opts;
      opts.image_name = name.empty() ? std::filesystem::path(cover_path).stem().string() : name;
      opts.layers = layers;
      opts.modes = parse_modes(modes);
      opts.seed = seed;
      opts.m_grid = parse_grid(grid);
      opts.t_border = t_border;
      opts.verify = verify;
      const auto rows = run_sweep(cover, opts);
      std::ofstream out(csv_path);
      if (!out)
        throw Error(ErrorCode::IoFailure, "cannot write " + csv_path);
      write_sweep_csv(out, rows);
      std::cout << rows.size() << " rows written to " << csv_path << '\n';
    } else if (*algmap) {
      GrayImage img = load_pgm(cover_path);
      LayerConfig cfg;
      cfg.t_border = t_border;
      cfg.m_grid = parse_grid(grid);
      cfg.perm_seed = seed;
      cfg.partial = true;
      EmbedResult res;
      for (int k = 1; k <= layer; ++k) {
        cfg.layer_index = static_cast<std::uint8_t>(k);
        cfg.payload = random_bits(seed + static_cast<std::uint64_t>(k), img.size());
        res = embed_layer(k == 1 ? img : rotate90(img), cfg);
        img = res.marked;
      }
      const Partition part = make_partition(img.height(), img.width(),
                                            res.report.t_border, res.report.m_used);
      const AlgMap map = render_alg_map(res.report.plans, part);
      store_pgm(map.image(), out_path + ".pgm");
      std::ofstream txt(out_path + ".txt");
      txt << map.text();
      std::cout << map.text();
    }
  } catch (const Error &e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
