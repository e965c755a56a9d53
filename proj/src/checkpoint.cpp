#include "glrec/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "glrec/error.hpp"

namespace glrec {

namespace {

constexpr char kMagic[8] = {'G', 'L', 'R', 'E', 'C', 'K', 'P', '1'};

void write_u64(std::ostream& os, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw Error("CorruptCheckpoint", "unexpected end of file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& os, double d) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, 8);
  write_u64(os, bits);
}

double read_f64(std::istream& is) {
  const uint64_t bits = read_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_vec(std::ostream& os, const std::vector<double>& v) {
  write_u64(os, v.size());
  for (double d : v) write_f64(os, d);
}

std::vector<double> read_vec(std::istream& is) {
  std::vector<double> v(read_u64(is));
  for (double& d : v) d = read_f64(is);
  return v;
}

void write_mat(std::ostream& os, const Mat& m) {
  write_u64(os, static_cast<uint64_t>(m.rows));
  write_u64(os, static_cast<uint64_t>(m.cols));
  for (double d : m.v) write_f64(os, d);
}

Mat read_mat(std::istream& is) {
  const auto rows = static_cast<int>(read_u64(is));
  const auto cols = static_cast<int>(read_u64(is));
  Mat m(rows, cols);
  for (double& d : m.v) d = read_f64(is);
  return m;
}

void write_str(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& is) {
  std::string s(read_u64(is), '\0');
  is.read(s.data(), static_cast<std::streamsize>(s.size()));
  if (!is) throw Error("CorruptCheckpoint", "unexpected end of file");
  return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("IoError", "cannot open " + tmp + " for writing");
    os.write(kMagic, 8);

    const ModelConfig& c = ckpt.config;
    write_u64(os, static_cast<uint64_t>(c.vocab_size));
    write_u64(os, static_cast<uint64_t>(c.d_e));
    write_u64(os, static_cast<uint64_t>(c.n_layers));
    write_u64(os, static_cast<uint64_t>(c.n_heads));
    write_u64(os, static_cast<uint64_t>(c.context_len));
    write_u64(os, static_cast<uint64_t>(c.lora_rank));
    write_f64(os, c.lora_alpha);
    write_u64(os, c.lora_all_projections ? 1 : 0);
    write_u64(os, c.seed);

    write_u64(os, ckpt.tokenizer.vocab().size());
    for (const auto& tok : ckpt.tokenizer.vocab()) write_str(os, tok);

    write_mat(os, ckpt.base.embed);
    write_mat(os, ckpt.base.pos);
    write_u64(os, ckpt.base.layers.size());
    for (const auto& l : ckpt.base.layers) {
      write_vec(os, l.ln1_g);
      write_vec(os, l.ln1_b);
      write_vec(os, l.ln2_g);
      write_vec(os, l.ln2_b);
      write_mat(os, l.wq);
      write_mat(os, l.wk);
      write_mat(os, l.wv);
      write_mat(os, l.wo);
      write_mat(os, l.w1);
      write_mat(os, l.w2);
      write_vec(os, l.b1);
      write_vec(os, l.b2);
    }
    write_vec(os, ckpt.base.lnf_g);
    write_vec(os, ckpt.base.lnf_b);
    write_mat(os, ckpt.base.wout);

    write_u64(os, ckpt.adapters.layers.size());
    for (const auto& la : ckpt.adapters.layers) {
      for (const auto& ad : la.at) {
        write_u64(os, ad ? 1 : 0);
        if (ad) {
          write_mat(os, ad->a);
          write_mat(os, ad->b);
          write_f64(os, ad->scaling);
        }
      }
    }

    write_vec(os, ckpt.selector.w_a);
    write_f64(os, ckpt.selector.lambda);
    if (!os) throw Error("IoError", "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("IoError", "cannot open checkpoint " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw Error("CorruptCheckpoint", "bad magic in " + path);

  Checkpoint ckpt;
  ModelConfig& c = ckpt.config;
  c.vocab_size = static_cast<int>(read_u64(is));
  c.d_e = static_cast<int>(read_u64(is));
  c.n_layers = static_cast<int>(read_u64(is));
  c.n_heads = static_cast<int>(read_u64(is));
  c.context_len = static_cast<int>(read_u64(is));
  c.lora_rank = static_cast<int>(read_u64(is));
  c.lora_alpha = read_f64(is);
  c.lora_all_projections = read_u64(is) != 0;
  c.seed = read_u64(is);

  std::vector<std::string> vocab(read_u64(is));
  for (auto& tok : vocab) tok = read_str(is);
  ckpt.tokenizer.set_vocab(std::move(vocab));

  ckpt.base.embed = read_mat(is);
  ckpt.base.pos = read_mat(is);
  ckpt.base.layers.resize(read_u64(is));
  for (auto& l : ckpt.base.layers) {
    l.ln1_g = read_vec(is);
    l.ln1_b = read_vec(is);
    l.ln2_g = read_vec(is);
    l.ln2_b = read_vec(is);
    l.wq = read_mat(is);
    l.wk = read_mat(is);
    l.wv = read_mat(is);
    l.wo = read_mat(is);
    l.w1 = read_mat(is);
    l.w2 = read_mat(is);
    l.b1 = read_vec(is);
    l.b2 = read_vec(is);
  }
  ckpt.base.lnf_g = read_vec(is);
  ckpt.base.lnf_b = read_vec(is);
  ckpt.base.wout = read_mat(is);

  ckpt.adapters.layers.resize(read_u64(is));
  for (auto& la : ckpt.adapters.layers) {
    for (auto& ad : la.at) {
      if (read_u64(is) != 0) {
        LoraAdapter a;
        a.a = read_mat(is);
        a.b = read_mat(is);
        a.scaling = read_f64(is);
        ad = std::move(a);
      }
    }
  }

  ckpt.selector.w_a = read_vec(is);
  ckpt.selector.lambda = read_f64(is);
  return ckpt;
}

}  // namespace glrec
