#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cccn/cache.hpp"
#include "cccn/rng.hpp"

using namespace cccn;

namespace {

StoredItem plain_item(std::uint64_t content, int segment) {
  StoredItem it;
  it.content_id = content;
  it.kind = ItemKind::plain;
  it.segment = segment;
  return it;
}

StoredItem coded_item(const Field& f, std::uint64_t content, int k,
                      std::vector<FieldElement> vec) {
  StoredItem it;
  it.content_id = content;
  it.kind = ItemKind::coded;
  it.symbol.content_id = content;
  it.symbol.generation_size = k;
  it.symbol.coding_vector = std::move(vec);
  it.symbol.payload = {1, 2, 3};
  return it;
}

std::string dump(const ContentStore& cs) {
  std::ostringstream os;
  for (const StoredItem* it : cs.all_items())
    os << it->content_id << ":" << (it->kind == ItemKind::plain ? "p" : "c")
       << it->segment << ":" << it->hit_count << ":" << it->privileged << ";";
  return os.str();
}

}  // namespace

TEST_CASE("capacity split: 100 segments gives a 20-slot unprivileged side") {
  ContentStore cs(100);
  CHECK(cs.unprivileged_capacity() == 20);
  CHECK(cs.privileged_capacity() == 80);
  ContentStore small(20);
  CHECK(small.unprivileged_capacity() == 4);
}

TEST_CASE("insert into empty store lands unprivileged with no eviction") {
  ContentStore cs(10);
  auto ev = cs.insert(plain_item(1, 0), 0.0);
  CHECK(ev.empty());
  CHECK(cs.size() == 1);
  CHECK(cs.unpriv_size() == 1);
  CHECK(cs.priv_size() == 0);
}

TEST_CASE("unprivileged eviction is least-frequent then least-recent") {
  ContentStore cs(15);  // unpriv capacity 3
  REQUIRE(cs.unprivileged_capacity() == 3);
  cs.insert(plain_item(1, 0), 1.0);
  cs.insert(plain_item(2, 0), 2.0);
  cs.insert(plain_item(3, 0), 3.0);
  // hit content 1 five times; contents 2 and 3 stay at count ~0
  for (int i = 0; i < 5; ++i) cs.lookup(1, {0}, 4.0 + i);
  // 1 got promoted on its first re-hit, freeing an unprivileged slot
  cs.insert(plain_item(4, 0), 10.0);
  CHECK(cs.size() == 4);
  // next insert evicts the older of the two count-0 entries: content 2
  auto ev = cs.insert(plain_item(5, 0), 11.0);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].content_id == 2);
  CHECK(cs.contains_plain(3, 0));
}

TEST_CASE("re-hit promotes; full privileged side demotes its LRU") {
  ContentStore cs(10);  // unpriv 2, priv 8
  for (int c = 0; c < 8; ++c) {
    cs.insert(plain_item(c, 0), c);
    cs.lookup(c, {0}, 10.0 + c);  // promote each
  }
  CHECK(cs.priv_size() == 8);
  cs.insert(plain_item(100, 0), 50.0);
  cs.lookup(100, {0}, 51.0);  // promotion demotes the privileged LRU (content 0)
  CHECK(cs.priv_size() == 8);
  CHECK(cs.size() == 9);
  bool found = false;
  for (const StoredItem* it : cs.all_items())
    if (it->content_id == 0) {
      CHECK(!it->privileged);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("duplicate plain insert counts as a hit, not a copy") {
  ContentStore cs(10);
  cs.insert(plain_item(7, 3), 0.0);
  cs.insert(plain_item(7, 3), 1.0);
  CHECK(cs.size() == 1);
}

TEST_CASE("lookup returns hits, misses and the coded side separately") {
  Field f(FieldParams::standard(8));
  ContentStore cs(50, &f);
  LookupResult empty = cs.lookup(9, {1, 2, 3}, 0.0);
  CHECK(empty.plain_hits.empty());
  CHECK(empty.coded_hits.empty());
  CHECK(empty.missing == std::vector<int>{1, 2, 3});

  cs.insert(plain_item(9, 3), 1.0);
  cs.insert(plain_item(9, 7), 1.0);
  std::vector<int> wanted{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  LookupResult r = cs.lookup(9, wanted, 2.0);
  CHECK(r.plain_hits == std::vector<int>{3, 7});
  CHECK(r.missing == std::vector<int>{1, 2, 4, 5, 6, 8, 9, 10});

  cs.insert(coded_item(f, 11, 4, {1, 2, 0, 0}), 3.0);
  LookupResult c = cs.lookup(11, {0, 1}, 4.0);
  CHECK(c.plain_hits.empty());
  CHECK(c.coded_hits.size() == 1);
  CHECK(c.missing == std::vector<int>{0, 1});
}

TEST_CASE("contains_encoded discriminates by kind") {
  Field f(FieldParams::standard(8));
  ContentStore cs(50, &f);
  CHECK(!cs.contains_encoded(5));
  cs.insert(plain_item(5, 0), 0.0);
  CHECK(!cs.contains_encoded(5));
  cs.insert(coded_item(f, 5, 4, {1, 1, 0, 0}), 1.0);
  CHECK(cs.contains_encoded(5));
}

TEST_CASE("coded admission requires innovation within the generation") {
  Field f(FieldParams::standard(8));
  ContentStore cs(50, &f);
  cs.insert(coded_item(f, 5, 4, {1, 0, 0, 0}), 0.0);
  cs.insert(coded_item(f, 5, 4, {0, 1, 0, 0}), 1.0);
  CHECK(cs.size() == 2);
  cs.insert(coded_item(f, 5, 4, {1, 1, 0, 0}), 2.0);  // in the span already
  CHECK(cs.size() == 2);
  cs.insert(coded_item(f, 5, 4, {0, 0, 1, 0}), 3.0);
  CHECK(cs.size() == 3);
}

TEST_CASE("random traces: capacity respected, behavior deterministic") {
  Field f(FieldParams::standard(8));
  auto run = [&](std::uint64_t seed) {
    ContentStore cs(25, &f);
    Rng rng(seed);
    for (int op = 0; op < 100000; ++op) {
      std::uint64_t content = rng.below(40);
      int seg = static_cast<int>(rng.below(10));
      double now = op * 0.001;
      if (rng.below(3) == 0) {
        cs.lookup(content, {seg}, now);
      } else if (rng.below(5) == 0) {
        std::vector<FieldElement> vec(10, 0);
        vec[seg] = static_cast<FieldElement>(1 + rng.below(255));
        vec[(seg + 3) % 10] = static_cast<FieldElement>(rng.below(256));
        cs.insert(coded_item(f, content, 10, vec), now);
      } else {
        cs.insert(plain_item(content, seg), now);
      }
      REQUIRE(cs.size() <= 25);
      REQUIRE(cs.unpriv_size() <= cs.unprivileged_capacity());
      REQUIRE(cs.priv_size() <= cs.privileged_capacity());
    }
    return dump(cs);
  };
  std::string a = run(1234), b = run(1234), c = run(999);
  CHECK(a == b);
  CHECK(a != c);
}
