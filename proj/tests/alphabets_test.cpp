#include "chordlab/alphabets.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"

namespace chordlab {
namespace {

TEST(EnumerateClasses, Cardinalities) {
  EXPECT_EQ(enumerate_classes(AlphabetId::kA0).size(), 25u);
  EXPECT_EQ(enumerate_classes(AlphabetId::kA1).size(), 73u);
  EXPECT_EQ(enumerate_classes(AlphabetId::kA2).size(), 169u);
}

TEST(EnumerateClasses, IndexOrder) {
  for (AlphabetId a : kAllAlphabets) {
    auto classes = enumerate_classes(a);
    EXPECT_TRUE(classes[0].is_no_chord());
    std::set<std::string> names;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      EXPECT_EQ(classes[i].index(), static_cast<int>(i));
      names.insert(classes[i].name());
      if (i == 0) continue;
      // Roots ascend in blocks; qualities follow the alphabet listing.
      const auto nq = alphabet_qualities(a).size();
      EXPECT_EQ(classes[i].root()->value(), static_cast<int>((i - 1) / nq));
      EXPECT_EQ(classes[i].quality(), alphabet_qualities(a)[(i - 1) % nq]);
      EXPECT_EQ(ChordClass::of(a, *classes[i].root(), *classes[i].quality()), classes[i]);
    }
    EXPECT_EQ(names.size(), classes.size());
  }
  EXPECT_EQ(enumerate_classes(AlphabetId::kA0)[1].name(), "C:maj");
  EXPECT_EQ(enumerate_classes(AlphabetId::kA0)[2].name(), "C:min");
  EXPECT_EQ(enumerate_classes(AlphabetId::kA0)[24].name(), "B:min");
  EXPECT_EQ(enumerate_classes(AlphabetId::kA1)[6].name(), "C:7");
  EXPECT_EQ(enumerate_classes(AlphabetId::kA2)[14].name(), "C:sus4");
}

TEST(ChordClass, RejectsBadIndex) {
  EXPECT_THROW(ChordClass(AlphabetId::kA0, 25), IndexOutOfAlphabet);
  EXPECT_THROW(ChordClass(AlphabetId::kA2, -1), IndexOutOfAlphabet);
  EXPECT_THROW(ChordClass::of(AlphabetId::kA0, PitchClass(0), Quality::kDim), std::invalid_argument);
}

TEST(Reduce, Examples) {
  EXPECT_EQ(reduce(parse_chord("F:maj7"), AlphabetId::kA1).name(), "F:maj7");
  EXPECT_EQ(reduce(parse_chord("C:maj7"), AlphabetId::kA0).name(), "C:maj");
  EXPECT_TRUE(reduce(parse_chord("C:sus4"), AlphabetId::kA1).is_no_chord());
}

TEST(Reduce, MatchesDecisionTableOracle) {
  for (const auto& [quality, images] : oracle::decision_table()) {
    for (int root = 0; root < 12; ++root) {
      auto label = ChordLabel::chord(PitchClass(root), *quality_from_name(quality));
      auto check = [&](AlphabetId a, const std::string& image) {
        auto cls = reduce(label, a);
        if (image == "N") {
          EXPECT_TRUE(cls.is_no_chord()) << quality << " -> " << alphabet_name(a);
        } else {
          ASSERT_FALSE(cls.is_no_chord()) << quality;
          EXPECT_EQ(cls.root()->value(), root);
          EXPECT_EQ(quality_name(*cls.quality()), image) << quality << " -> " << alphabet_name(a);
        }
      };
      check(AlphabetId::kA2, quality);
      check(AlphabetId::kA1, images.first);
      check(AlphabetId::kA0, images.second);
    }
  }
}

TEST(Reduce, CommutesDownTheChain) {
  for (const auto& c : enumerate_classes(AlphabetId::kA2)) {
    EXPECT_EQ(reduce(reduce(c, AlphabetId::kA1), AlphabetId::kA0), reduce(c, AlphabetId::kA0))
        << c.name();
    EXPECT_EQ(reduce(reduce(c, AlphabetId::kA2), AlphabetId::kA1), reduce(c, AlphabetId::kA1));
  }
}

TEST(Reduce, IdempotentOnResidents) {
  for (AlphabetId a : kAllAlphabets) {
    for (const auto& c : enumerate_classes(a)) EXPECT_EQ(reduce(c, a), c);
  }
}

TEST(Reduce, RootPreservingOrNoChord) {
  for (const auto& c : enumerate_classes(AlphabetId::kA2)) {
    for (AlphabetId a : kAllAlphabets) {
      auto r = reduce(c, a);
      if (!r.is_no_chord()) {
        EXPECT_EQ(r.root(), c.root());
      }
    }
  }
}

TEST(ClassOf, Examples) {
  EXPECT_EQ(class_of("F:maj7(11)/3", AlphabetId::kA1).name(), "F:maj7");
  EXPECT_EQ(class_of("N", AlphabetId::kA2).index(), 0);
  EXPECT_TRUE(class_of("G:dim7", AlphabetId::kA0).is_no_chord());
  EXPECT_EQ(class_of("Bb:7(b9)/5", AlphabetId::kA0).name(), "A#:maj");
}

TEST(ClassOf, TranspositionEquivariant) {
  for (const auto& c : enumerate_classes(AlphabetId::kA2)) {
    for (int k = -6; k <= 6; ++k) {
      for (AlphabetId a : kAllAlphabets) {
        EXPECT_EQ(class_of(transpose(c.label(), k), a), transpose(class_of(c.label(), a), k));
      }
    }
  }
}

TEST(QualityHierarchy, CsvResourceMatchesTable) {
  std::ifstream in(CHORDLAB_DATA_DIR "/quality_hierarchy.csv");
  ASSERT_TRUE(in) << "missing data/quality_hierarchy.csv";
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), quality_hierarchy_csv());
}

TEST(QualityHierarchy, A0ImagesAreMajMinOrN) {
  for (Quality q : kAllQualities) {
    auto img = reduce_quality(q, AlphabetId::kA0);
    if (img) {
      EXPECT_TRUE(*img == Quality::kMaj || *img == Quality::kMin);
    }
  }
}

}  // namespace
}  // namespace chordlab
