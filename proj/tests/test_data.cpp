#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "gmatch/checkpoint.hpp"
#include "gmatch/conllu.hpp"
#include "gmatch/dataset.hpp"
#include "gmatch/embeddings.hpp"
#include "gmatch/model.hpp"
#include "gmatch/vocab.hpp"
#include "json.hpp"
#include "synthetic.hpp"
#include "tmpdir.hpp"

using namespace gmatch;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

const char* kSample =
    "# a comment line\n"
    "1\tthe\t_\t_\t_\t_\t2\tdet\n"
    "2\tdog\t_\t_\t_\t_\t3\tnsubj\n"
    "3\truns\t_\t_\t_\t_\t0\troot\n"
    "\n"
    "1 a 2 det\n"
    "2 cat 0 root\n";

std::string pair_line(const std::string& id, const std::string& label,
                      const ParsedSentence& p, const ParsedSentence& h) {
  nlohmann::json j;
  j["pair_id"] = id;
  j["label"] = label;
  for (const auto& [key, s] : {std::pair<const char*, const ParsedSentence&>{"premise", p},
                               {"hypothesis", h}}) {
    j[key]["tokens"] = s.tokens;
    j[key]["heads"] = s.heads;
    j[key]["deprels"] = s.deprels;
  }
  return j.dump() + "\n";
}

ParsedSentence tiny_sentence() {
  ParsedSentence s;
  s.tokens = {"a", "dog", "runs"};
  s.heads = {1, 2, ParsedSentence::kRootHead};
  s.deprels = {"det", "nsubj", "root"};
  s.root_index = 2;
  return s;
}

}  // namespace

TEST_CASE("parse_conllu reads both column layouts") {
  const auto sentences = parse_conllu(kSample);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0].tokens == std::vector<std::string>{"the", "dog", "runs"});
  CHECK(sentences[0].heads == std::vector<int>{1, 2, ParsedSentence::kRootHead});
  CHECK(sentences[0].deprels == std::vector<std::string>{"det", "nsubj", "root"});
  CHECK(sentences[0].root_index == 2);
  CHECK(sentences[1].tokens == std::vector<std::string>{"a", "cat"});
  CHECK(sentences[1].root_index == 1);
}

TEST_CASE("parse_conllu strips carriage returns and needs no final blank line") {
  const auto sentences = parse_conllu("1\tok\t_\t_\t_\t_\t0\troot\r\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tokens == std::vector<std::string>{"ok"});
}

TEST_CASE("parse_conllu rejects malformed input with the line number") {
  CHECK_THROWS_WITH_AS(parse_conllu("1 only-three 0\n"), doctest::Contains("line 1"),
                       FormatError);
  CHECK_THROWS_AS(parse_conllu("1 a x root\n"), FormatError);       // non-integer head
  CHECK_THROWS_AS(parse_conllu("2 a 0 root\n"), FormatError);       // ids must count from 1
  CHECK_THROWS_AS(parse_conllu("1 a 5 det\n"), StructuralError);    // head out of range
  CHECK_THROWS_AS(parse_conllu("1 a 2 det\n2 b 1 det\n"), StructuralError);  // no root
  CHECK_THROWS_AS(parse_conllu("1 a 0 root\n2 b 0 root\n"), StructuralError);
}

TEST_CASE("validate_tree rejects cycles and self-heads") {
  CHECK(validate_tree({1, ParsedSentence::kRootHead}, 0) == 1);
  CHECK_THROWS_AS(validate_tree({}, 0), StructuralError);
  CHECK_THROWS_AS(validate_tree({0, ParsedSentence::kRootHead}, 0), StructuralError);
  CHECK_THROWS_WITH_AS(validate_tree({1, 2, 0, ParsedSentence::kRootHead}, 3),
                       doctest::Contains("cycle"), StructuralError);
  ParsedSentence s = tiny_sentence();
  validate_sentence(s, 0);
  s.root_index = 0;
  CHECK_THROWS_AS(validate_sentence(s, 0), StructuralError);
}

TEST_CASE("to_conllu round-trips through parse_conllu") {
  Rng rng(mix_seed(42, 0));
  for (int i = 0; i < 20; ++i) {
    const ParsedSentence s = testsupport::random_sentence(rng, rng.uniform_int(1, 8));
    const auto parsed = parse_conllu(to_conllu(s));
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].tokens == s.tokens);
    CHECK(parsed[0].heads == s.heads);
    CHECK(parsed[0].deprels == s.deprels);
    CHECK(parsed[0].root_index == s.root_index);
  }
}

TEST_CASE("label sets") {
  const LabelSet snli = LabelSet::snli3();
  CHECK(snli.names() == std::vector<std::string>{"entailment", "neutral", "contradiction"});
  CHECK(snli.id("neutral") == 1);
  CHECK(snli.id("paraphrase") == -1);
  CHECK(snli.name(2) == "contradiction");
  CHECK_THROWS_AS(snli.name(3), std::out_of_range);

  CHECK(LabelSet::binary().names() == std::vector<std::string>{"0", "1"});
  CHECK_THROWS_AS(LabelSet::from_names({"a", "a"}), FormatError);

  TempDir dir;
  write_file(dir.file("labels.txt"), "yes\r\n\nno\n");
  const LabelSet file = LabelSet::from_file(dir.file("labels.txt"));
  CHECK(file.names() == std::vector<std::string>{"yes", "no"});
  CHECK_THROWS_AS(LabelSet::from_file(dir.file("missing.txt")), FormatError);
  write_file(dir.file("empty.txt"), "\n\n");
  CHECK_THROWS_AS(LabelSet::from_file(dir.file("empty.txt")), FormatError);
}

TEST_CASE("is_punctuation") {
  CHECK(is_punctuation("..."));
  CHECK(is_punctuation("?!"));
  CHECK_FALSE(is_punctuation("a."));
  CHECK_FALSE(is_punctuation(""));
}

TEST_CASE("load_pairs reads JSONL and validates structure") {
  TempDir dir;
  const ParsedSentence s = tiny_sentence();
  std::string body = pair_line("p1", "1", s, s) + "\n" + pair_line("p2", "0", s, s);
  write_file(dir.file("data.jsonl"), body);

  const LoadReport report = load_pairs(dir.file("data.jsonl"), LabelSet::binary());
  REQUIRE(report.pairs.size() == 2);
  CHECK(report.warnings.empty());
  CHECK(report.pairs[0].pair_id == "p1");
  CHECK(report.pairs[0].label == 1);
  CHECK(report.pairs[0].premise.root_index == 2);
  CHECK(report.pairs[1].label == 0);
}

TEST_CASE("load_pairs failure modes name the offending line") {
  TempDir dir;
  const ParsedSentence s = tiny_sentence();
  const LabelSet labels = LabelSet::binary();

  write_file(dir.file("bad.jsonl"), "not json\n");
  CHECK_THROWS_WITH_AS(load_pairs(dir.file("bad.jsonl"), labels), doctest::Contains(":1"),
                       FormatError);

  write_file(dir.file("label.jsonl"), pair_line("p1", "maybe", s, s));
  CHECK_THROWS_WITH_AS(load_pairs(dir.file("label.jsonl"), labels),
                       doctest::Contains("maybe"), FormatError);

  ParsedSentence broken = s;
  broken.heads = {1, 2};  // shorter than tokens
  write_file(dir.file("len.jsonl"), pair_line("p1", "0", broken, s));
  CHECK_THROWS_AS(load_pairs(dir.file("len.jsonl"), labels), FormatError);

  ParsedSentence cyclic = s;
  cyclic.heads = {1, 0, ParsedSentence::kRootHead};
  write_file(dir.file("cycle.jsonl"), pair_line("p1", "0", cyclic, s));
  CHECK_THROWS_WITH_AS(load_pairs(dir.file("cycle.jsonl"), labels), doctest::Contains("p1"),
                       StructuralError);

  write_file(dir.file("missing.jsonl"), "{\"pair_id\": \"p1\"}\n");
  CHECK_THROWS_AS(load_pairs(dir.file("missing.jsonl"), labels), FormatError);

  CHECK_THROWS_AS(load_pairs(dir.file("absent.jsonl"), labels), FormatError);
}

TEST_CASE("load_pairs keeps punctuation-only sentences but warns") {
  TempDir dir;
  ParsedSentence punct;
  punct.tokens = {"...", "!"};
  punct.heads = {1, ParsedSentence::kRootHead};
  punct.deprels = {"punct", "root"};
  punct.root_index = 1;
  write_file(dir.file("punct.jsonl"), pair_line("p1", "0", punct, tiny_sentence()));
  const LoadReport report = load_pairs(dir.file("punct.jsonl"), LabelSet::binary());
  CHECK(report.pairs.size() == 1);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("p1") != std::string::npos);
}

TEST_CASE("vocab lowercases, filters by frequency and sorts") {
  std::vector<LabeledPair> pairs;
  LabeledPair pair;
  pair.pair_id = "p";
  pair.label = 0;
  pair.premise = tiny_sentence();     // a dog runs
  pair.hypothesis = tiny_sentence();  // a dog runs
  pair.hypothesis.tokens = {"The", "Dog", "naps"};
  pairs.push_back(pair);

  const Vocab all = build_vocab(pairs, 1);
  CHECK(all.words()[Vocab::kPad] == "<pad>");
  CHECK(all.words()[Vocab::kUnk] == "<unk>");
  CHECK(std::is_sorted(all.words().begin() + 2, all.words().end()));
  CHECK(all.id("DOG") == all.id("dog"));
  CHECK(all.id("zebra") == Vocab::kUnk);

  const Vocab frequent = build_vocab(pairs, 2);  // only "dog" appears twice
  CHECK(frequent.size() == 3);
  CHECK(frequent.id("dog") == 2);
  CHECK(frequent.id("runs") == Vocab::kUnk);
  CHECK_THROWS_AS(build_vocab(pairs, 0), std::invalid_argument);

  const Vocab reloaded = Vocab::from_words(all.words());
  CHECK(reloaded.words() == all.words());
  CHECK_THROWS_AS(Vocab::from_words({"<unk>", "<pad>"}), std::invalid_argument);
  CHECK_THROWS_AS(Vocab::from_words({"<pad>", "<unk>", "x", "x"}), std::invalid_argument);
}

TEST_CASE("vocab depends on the corpus multiset, not pair order") {
  const auto pairs = testsupport::entity_task(40, 6, 3);
  auto shuffled = pairs;
  Rng rng(7);
  rng.shuffle(shuffled);
  CHECK(build_vocab(pairs, 1).words() == build_vocab(shuffled, 1).words());
}

TEST_CASE("relation vocab pairs every label with its reverse") {
  const auto pairs = testsupport::entity_task(10, 4, 5);
  const RelationVocab rels = build_relation_vocab(pairs);
  CHECK(rels.labels()[RelationVocab::kSeq] == "<seq>");
  CHECK(rels.labels()[RelationVocab::kInter] == "<inter>");
  CHECK(rels.labels()[RelationVocab::kSelf] == "<self>");
  REQUIRE(rels.size() > 3);
  for (int i = 3; i < rels.size(); i += 2) {
    CHECK(rels.labels()[i + 1] == rels.labels()[i] + ":rev");
    CHECK(rels.inverse(i) == i + 1);
    CHECK(rels.inverse(i + 1) == i);
  }
  for (int special : {RelationVocab::kSeq, RelationVocab::kInter, RelationVocab::kSelf}) {
    CHECK(rels.inverse(special) == special);
  }
  CHECK(rels.id("nsubj") >= 3);
  CHECK(rels.id("nope") == -1);
  CHECK_THROWS_AS(rels.inverse(rels.size()), std::out_of_range);
  CHECK_THROWS_AS(RelationVocab::from_labels({"<seq>", "<inter>", "<self>", "det"}),
                  std::invalid_argument);
}

TEST_CASE("random embeddings zero the padding row and stay in range") {
  const auto pairs = testsupport::entity_task(10, 4, 5);
  const Vocab vocab = build_vocab(pairs, 1);
  const EmbeddingMatrix m = random_embeddings(vocab, 8, 123);
  REQUIRE(m.rows == vocab.size());
  REQUIRE(m.cols == 8);
  for (int c = 0; c < m.cols; ++c) CHECK(m.row(Vocab::kPad)[c] == 0);
  for (int r = 1; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      CHECK(std::abs(m.row(r)[c]) <= 0.05);
    }
  }
  const EmbeddingMatrix again = random_embeddings(vocab, 8, 123);
  CHECK(m.data == again.data);
}

TEST_CASE("load_embeddings merges file rows with seeded fills") {
  const auto pairs = testsupport::entity_task(10, 4, 5);
  const Vocab vocab = build_vocab(pairs, 1);
  TempDir dir;

  // "ent0" is in the vocab; "missing" is not; the header line is skipped;
  // the second ENT0 row must lose to the first.
  write_file(dir.file("vec.txt"),
             "2 4\n"
             "ent0 1 2 3 4\n"
             "ENT0 9 9 9 9\n"
             "missing 5 5 5 5\n");
  const EmbeddingMatrix m = load_embeddings(dir.file("vec.txt"), vocab, 4, 99);
  CHECK(m.hits == 1);
  const int id = vocab.id("ent0");
  CHECK(m.row(id)[0] == 1);
  CHECK(m.row(id)[3] == 4);
  for (int c = 0; c < 4; ++c) CHECK(m.row(Vocab::kPad)[c] == 0);

  // Same vectors in a different file order give the same matrix.
  write_file(dir.file("vec2.txt"),
             "missing 5 5 5 5\n"
             "ent0 1 2 3 4\n");
  CHECK(load_embeddings(dir.file("vec2.txt"), vocab, 4, 99).data == m.data);

  write_file(dir.file("short.txt"), "word 1 2\n");
  CHECK_THROWS_AS(load_embeddings(dir.file("short.txt"), vocab, 4, 99), FormatError);
  write_file(dir.file("alpha.txt"), "word 1 2 x 4\n");
  CHECK_THROWS_AS(load_embeddings(dir.file("alpha.txt"), vocab, 4, 99), FormatError);
  CHECK_THROWS_AS(load_embeddings(dir.file("absent.txt"), vocab, 4, 99), FormatError);
}

TEST_CASE("checkpoint files survive a bit-exact round trip") {
  ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.lstm_layers = 1;
  cfg.lstm_hidden = 4;
  cfg.heads = 2;
  cfg.head_dim = 2;
  cfg.relation_dim = 4;
  cfg.classifier_hidden = 4;
  cfg.num_classes = 2;
  ModelParams params(cfg, 5, 5, 17);

  CheckpointData data;
  data.config = cfg;
  data.strategy.strategy = Strategy::kCooccurrence;
  data.strategy.alpha = 0.25;
  data.strategy.stopwords = {"the", "a"};
  data.strategy.resample_each_epoch = false;
  data.vocab_words = {"<pad>", "<unk>", "dog"};
  data.relation_labels = {"<seq>", "<inter>", "<self>", "det", "det:rev"};
  data.label_names = {"0", "1"};
  data.epoch = 7;
  data.adam_t = 21;
  data.best_val_acc = 0.75;
  data.seed = 99;
  for (const auto& [name, value] : params.store().entries()) {
    data.arrays.push_back({"param." + name, value.shape(), value.data()});
  }

  TempDir dir;
  save_checkpoint(dir.file("model.ckpt"), data);
  const CheckpointData loaded = load_checkpoint(dir.file("model.ckpt"));

  CHECK(config_to_json(loaded.config) == config_to_json(data.config));
  CHECK(loaded.strategy.strategy == Strategy::kCooccurrence);
  CHECK(loaded.strategy.alpha == 0.25);
  CHECK(loaded.strategy.stopwords == data.strategy.stopwords);
  CHECK(loaded.strategy.resample_each_epoch == false);
  CHECK(loaded.vocab_words == data.vocab_words);
  CHECK(loaded.relation_labels == data.relation_labels);
  CHECK(loaded.label_names == data.label_names);
  CHECK(loaded.epoch == 7);
  CHECK(loaded.adam_t == 21);
  CHECK(loaded.best_val_acc == 0.75);
  CHECK(loaded.seed == 99);
  REQUIRE(loaded.arrays.size() == data.arrays.size());
  for (std::size_t i = 0; i < data.arrays.size(); ++i) {
    CHECK(loaded.arrays[i].name == data.arrays[i].name);
    CHECK(loaded.arrays[i].shape == data.arrays[i].shape);
    REQUIRE(loaded.arrays[i].data.size() == data.arrays[i].data.size());
    CHECK(std::memcmp(loaded.arrays[i].data.data(), data.arrays[i].data.data(),
                      data.arrays[i].data.size() * sizeof(ad::real)) == 0);
  }
  CHECK(loaded.find("param.embed") != nullptr);
  CHECK(loaded.find("param.nope") == nullptr);

  // A second save of the same data is byte-identical.
  save_checkpoint(dir.file("again.ckpt"), data);
  CHECK(testsupport::read_file(dir.file("again.ckpt")) ==
        testsupport::read_file(dir.file("model.ckpt")));
}

TEST_CASE("checkpoint loader rejects foreign and truncated files") {
  TempDir dir;
  write_file(dir.file("junk.ckpt"), "definitely not a checkpoint");
  CHECK_THROWS_WITH_AS(load_checkpoint(dir.file("junk.ckpt")),
                       doctest::Contains("not a checkpoint"), FormatError);

  CheckpointData data;
  data.config.embed_dim = 2;
  data.config.lstm_hidden = 2;
  data.config.heads = 1;
  data.config.head_dim = 2;
  data.arrays.push_back({"param.x", {2, 2}, {1, 2, 3, 4}});
  save_checkpoint(dir.file("ok.ckpt"), data);
  std::string bytes = testsupport::read_file(dir.file("ok.ckpt"));
  write_file(dir.file("cut.ckpt"), bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_WITH_AS(load_checkpoint(dir.file("cut.ckpt")), doctest::Contains("truncated"),
                       FormatError);
  CHECK_THROWS_AS(load_checkpoint(dir.file("never.ckpt")), FormatError);
}
