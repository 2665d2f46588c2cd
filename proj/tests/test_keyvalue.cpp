// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mppcal/keyvalue.hpp"

using namespace mppcal;

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::exp(u(gen)) * (i % 2 ? 1 : -1);
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
  EXPECT_EQ(format_double(0.21), "0.21");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(ParseNumbers, RejectGarbage) {
  EXPECT_THROW(parse_double("", "x"), Error);
  EXPECT_THROW(parse_double("1.0abc", "x"), Error);
  EXPECT_THROW(parse_u64("-1", "x"), Error);
  EXPECT_THROW(parse_u64("3.5", "x"), Error);
  EXPECT_EQ(parse_u64("18446744073709551615", "x"), std::numeric_limits<std::uint64_t>::max());
}

TEST(KeyValueDocument, SerializeAndParse) {
  KeyValueDocument doc("mppcal-report", "calibrate-g2");
  doc.set("fit.p_hat", 0.15927);
  doc.set("fit.converged", true);
  doc.set("run.triggers", std::uint64_t{2000000});
  doc.set("path", "out/signal_00.txt");
  doc.set("fit.p_hat", 0.16);  // overwrite keeps position
  const std::string text = doc.serialize();
  EXPECT_EQ(text,
            "format = mppcal-report\nversion = 1\ncommand = calibrate-g2\nfit.p_hat = 0.16\n"
            "fit.converged = true\nrun.triggers = 2000000\npath = out/signal_00.txt\n");
  const auto back = KeyValueDocument::parse("# comment\n" + text);
  EXPECT_EQ(back.entries(), doc.entries());
  EXPECT_EQ(back.require_double("fit.p_hat"), 0.16);
  EXPECT_EQ(back.require_u64("run.triggers"), 2000000u);
  EXPECT_FALSE(back.get("absent"));
  EXPECT_THROW(back.require("absent"), Error);
}

TEST(KeyValueDocument, ParseErrors) {
  EXPECT_THROW(KeyValueDocument::parse("format = a\n"), Error);
  EXPECT_THROW(KeyValueDocument::parse("format = a\nversion = 2\n"), Error);
  EXPECT_THROW(KeyValueDocument::parse("format = a\nversion = 1\nbroken line\n"), Error);
  EXPECT_THROW(KeyValueDocument::parse("format = a\nversion = 1\nk = 1\nk = 2\n"), Error);
  KeyValueDocument doc("a", "b");
  EXPECT_THROW(doc.set("k", "two\nlines"), Error);
}

TEST(KeyValueDocument, ValuesMayContainSeparator) {
  const auto doc = KeyValueDocument::parse("format = a\nversion = 1\nexpr = x = y\n");
  EXPECT_EQ(doc.require("expr"), "x = y");
}
