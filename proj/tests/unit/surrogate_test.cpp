#include "radvlp/deid/surrogate.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>

using namespace radvlp;
using namespace radvlp::deid;

namespace {

const SurrogatePolicy& base_policy() {
    static const SurrogatePolicy p = load_surrogate_policy(fixtures::data_path("config/surrogate.json"));
    return p;
}

SurrogatePolicy policy_with_shift(std::int64_t lo, std::int64_t hi) {
    SurrogatePolicy p = base_policy();
    p.shift_low = lo;
    p.shift_high = hi;
    return p;
}

/// Span over the first occurrence of @p needle at or after code point @p from.
PhiSpan span_of(const std::string& text, const std::string& needle, PhiCategory c, std::size_t from = 0) {
    const std::u32string t = text::decode_utf8(text), n = text::decode_utf8(needle);
    const std::size_t at = t.find(n, from);
    if (at == std::u32string::npos) throw std::runtime_error("needle not found: " + needle);
    return {at, at + n.size(), c, needle};
}

AnnotatedDocument annotated(std::string id, std::string patient, std::string text, std::vector<PhiSpan> spans,
                            CalendarDate date = {2015, 1, 12}) {
    return {RawDocument{std::move(id), std::move(patient), date, std::move(text), {}, std::nullopt}, std::move(spans)};
}

DeidDocument rewrite(const AnnotatedDocument& d, const SurrogatePolicy& p) {
    SurrogateMap m;
    return apply_surrogates(d, p, m);
}

std::string shifted(const std::string& surface, std::int64_t offset, CalendarDate doc = {2015, 1, 12}) {
    return text::encode_utf8(surrogate_detail::shift_date_surface(text::decode_utf8(surface), offset, doc));
}

}  // namespace

// --- random streams ----------------------------------------------------------

TEST(RandomStream, PublishedConstants) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    RandomStream s(0);
    EXPECT_EQ(s.next(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(s.next(), 0x6e789e6aa1b965f4ULL);
}

TEST(RandomStream, PatientStreamSeed) {
    EXPECT_EQ(derive_patient_stream(0, "").state(), 0xc3817c016ba4ff30ULL);
    EXPECT_EQ(derive_patient_stream(7, "patient-42").state(), 0x0be22590cb2c8ae9ULL);
    RandomStream a = derive_patient_stream(7, "patient-42");
    EXPECT_EQ(a.next(), 0x3c7a2aacfd56d26eULL);
}

TEST(RandomStream, SameInputsSameStream) {
    RandomStream a = derive_patient_stream(99, "P1"), b = derive_patient_stream(99, "P1");
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
    EXPECT_NE(derive_patient_stream(99, "A").next(), derive_patient_stream(99, "B").next());
}

TEST(RandomStream, BoundedDrawsStayInRangeAndCoverIt) {
    RandomStream s(5);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto x = s.between(-3, 3);
        ASSERT_GE(x, -3);
        ASSERT_LE(x, 3);
        ++counts[static_cast<std::size_t>(x + 3)];
    }
    for (const int c : counts) EXPECT_NEAR(c, 10000, 500);
    for (int i = 0; i < 1000; ++i) {
        const double u = s.unit();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RandomStream, Hex128Shape) {
    RandomStream s(1);
    const std::string h = s.hex128();
    EXPECT_TRUE(std::regex_match(h, std::regex("[0-9a-f]{32}")));
}

// --- examples ------------------------------------------------------------------

TEST(Surrogates, NumericDateShiftedByOneDay) {
    const std::string t = "RDV le 12/01/2015";
    const auto out = rewrite(annotated("d", "p", t, {span_of(t, "12/01/2015", PhiCategory::Date)}), policy_with_shift(1, 1));
    EXPECT_EQ(out.text, "RDV le 13/01/2015");
    EXPECT_EQ(out.date, (CalendarDate{2015, 1, 13}));
}

TEST(Surrogates, PhoneRemoval) {
    const std::string t = "Tel: +32 2 764 11 11.";
    const auto out = rewrite(annotated("d", "p", t, {span_of(t, "+32 2 764 11 11", PhiCategory::PhoneNumber)}),
                             base_policy());
    EXPECT_EQ(out.text, "Tel: .");
    ASSERT_EQ(out.applied.size(), 1u);
    EXPECT_EQ(out.applied[0].replacement, "");
}

TEST(Surrogates, RemovalCollapsesDoubleSpace) {
    const std::string t = "Mail jean@exemple.be pour suivi";
    const auto out = rewrite(annotated("d", "p", t, {span_of(t, "jean@exemple.be", PhiCategory::UrlEmail)}), base_policy());
    EXPECT_EQ(out.text, "Mail pour suivi");
}

TEST(Surrogates, SameSurnameSameReplacementAcrossDocuments) {
    const std::string a = "Vu par Monsieur Dupont ce jour.", b = "Courrier de Dupont reçu.";
    const std::vector<AnnotatedDocument> docs{annotated("a", "p1", a, {span_of(a, "Dupont", PhiCategory::PersonName)}),
                                              annotated("b", "p1", b, {span_of(b, "Dupont", PhiCategory::PersonName)})};
    SurrogateMap m;
    const auto out = apply_surrogates_corpus(docs, base_policy(), m);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].applied[0].replacement, out[1].applied[0].replacement);
    EXPECT_NE(out[0].applied[0].replacement, "Dupont");
    EXPECT_EQ(out[0].pseudo_patient_id, out[1].pseudo_patient_id);
}

// --- dates ---------------------------------------------------------------------

TEST(DateSurface, NumericShapesArePreserved) {
    EXPECT_EQ(shifted("12/01/2015", 1), "13/01/2015");
    EXPECT_EQ(shifted("3.4.98", 1), "4.4.98");
    EXPECT_EQ(shifted("31-12-99", 1), "01-01-00");
    EXPECT_EQ(shifted("05 mars 2014", 1), "06 mars 2014");
    EXPECT_EQ(shifted("05/03/2016", -5), "29/02/2016");
    EXPECT_EQ(shifted("1/1/29", 0), "1/1/29");
    EXPECT_EQ(shifted("31/12/1929", 1), "01/01/1930");
}

TEST(DateSurface, TwoDigitYearPivot) {
    // 29 -> 2029, 30 -> 1930
    EXPECT_EQ(shifted("01/01/29", -1), "31/12/28");
    EXPECT_EQ(shifted("01/01/30", -1), "31/12/29");
    EXPECT_EQ(shifted("28/02/00", 1), "29/02/00");  // 2000 is a leap year
    EXPECT_EQ(shifted("28/02/30", 1), "01/03/30");  // 1930 is not
}

TEST(DateSurface, TextualShapesArePreserved) {
    EXPECT_EQ(shifted("12 janvier 2015", 1), "13 janvier 2015");
    EXPECT_EQ(shifted("31 janvier 2015", 1), "1 février 2015");
    EXPECT_EQ(shifted("31 JANVIER 2015", 1), "1 FÉVRIER 2015");
    EXPECT_EQ(shifted("1er Mars 2014", 1), "2 Mars 2014");
    EXPECT_EQ(shifted("28 Février 2014", 1), "1 Mars 2014");
    EXPECT_EQ(shifted("1er mars 2014", 30), "31 mars 2014");
    EXPECT_EQ(shifted("1er mars 2014", 31), "1er avril 2014");
    EXPECT_EQ(shifted("5 déc. 2019", 30), "4 janv. 2020");
    EXPECT_EQ(shifted("5 dec 2019", 0), "5 dec 2019");
    EXPECT_EQ(shifted("5 fevrier 2019", 0), "5 fevrier 2019");
    EXPECT_EQ(shifted("2 sept. 2019", 30), "2 oct. 2019");
}

TEST(DateSurface, ImpossibleDayIsClamped) {
    EXPECT_EQ(shifted("31/02/2015", 0), "28/02/2015");
    EXPECT_EQ(shifted("30 février 2016", 1), "1 mars 2016");
}

TEST(DateSurface, UnparseableFallsBackToDocumentDate) {
    EXPECT_EQ(shifted("12/13/2015", 1, {2015, 1, 12}), "13/01/2015");
    EXPECT_EQ(shifted("12 brumaire 2015", 1, {2015, 1, 12}), "13 janvier 2015");
}

TEST(DateSurface, IntervalPreservedWithinPatient) {
    std::mt19937 rng(17);
    const SurrogatePolicy policy = base_policy();
    for (int t = 0; t < 50; ++t) {
        SurrogateMap m;
        const std::string pid = "P" + std::to_string(t);
        std::vector<CalendarDate> dates;
        std::vector<CalendarDate> out_dates;
        for (int k = 0; k < 5; ++k) {
            CalendarDate d{1950 + static_cast<int>(rng() % 60), 1 + static_cast<int>(rng() % 12), 1};
            d.day = 1 + static_cast<int>(rng() % days_in_month(d.year, d.month));
            char buf[40];
            std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d.day, d.month, d.year);
            const std::string text = std::string("Le ") + buf + ".";
            const auto out = apply_surrogates(annotated(pid + "-" + std::to_string(k), pid, text,
                                                        {span_of(text, buf, PhiCategory::Date)}),
                                              policy, m);
            dates.push_back(d);
            out_dates.push_back(parse_iso_date(text::slice_codepoints(out.text, 9, 13) + "-" +
                                               text::slice_codepoints(out.text, 6, 8) + "-" +
                                               text::slice_codepoints(out.text, 3, 5)));
        }
        const std::int64_t offset = m.patients.at(pid).date_offset_days;
        EXPECT_NE(offset, 0);
        EXPECT_GE(offset, -1000);
        EXPECT_LE(offset, 1000);
        for (std::size_t a = 0; a < dates.size(); ++a) {
            EXPECT_EQ(days_between(dates[a], out_dates[a]), offset);
            for (std::size_t b = 0; b < dates.size(); ++b) {
                EXPECT_EQ(days_between(out_dates[a], out_dates[b]), days_between(dates[a], dates[b]));
            }
        }
    }
}

// --- names, places, ids ----------------------------------------------------------

TEST(Surrogates, TitleDecidesGenderOfFirstName) {
    const SurrogatePolicy& p = base_policy();
    for (int seed = 0; seed < 20; ++seed) {
        SurrogatePolicy q = p;
        q.master_seed = static_cast<std::uint64_t>(seed);
        const std::string t = "Madame Jean Dupont est venue.";
        const auto out = rewrite(annotated("d", "p", t, {span_of(t, "Jean Dupont", PhiCategory::PersonName)}), q);
        const std::string rep = out.applied[0].replacement;
        const std::string first = rep.substr(0, rep.find(' '));
        EXPECT_TRUE(p.lexicons.female_first_names.contains_text(first)) << rep;
    }
}

TEST(Surrogates, PlacesNeverContainPatientNameWords) {
    // Institution and city lexicons hold "Saint-Jean" style entries; none may echo the patient's name.
    SurrogatePolicy p = base_policy();
    p.lexicons.institutions = parse_lexicon("institutions", "Clinique Saint-Jean\nCHU Saint-Pierre\nHôpital Delta\n");
    p.lexicons.cities = parse_lexicon("cities", "Molenbeek-Saint-Jean\nSaint-Pierre\nNamur\n");
    for (int seed = 0; seed < 40; ++seed) {
        p.master_seed = static_cast<std::uint64_t>(seed);
        const std::string t = "Jean Pierre Dufrasne, vu à l'hôpital Érasme, domicile à Liège.";
        AnnotatedDocument d = annotated("d", "p", t,
                                        {span_of(t, "Jean Pierre Dufrasne", PhiCategory::PatientName),
                                         span_of(t, "hôpital Érasme", PhiCategory::Institution),
                                         span_of(t, "Liège", PhiCategory::Location)});
        const auto out = rewrite(d, p);
        EXPECT_EQ(out.applied[1].replacement, "hôpital delta");
        EXPECT_EQ(out.applied[2].replacement, "Namur");
    }
}

TEST(Surrogates, CasingFollowsOriginal) {
    const std::string t = "MME DUPONT, vue avec Dr Lemaire.";
    const auto out = rewrite(annotated("d", "p", t,
                                       {span_of(t, "DUPONT", PhiCategory::PatientName),
                                        span_of(t, "Lemaire", PhiCategory::PersonName)}),
                             base_policy());
    const std::u32string up = text::decode_utf8(out.applied[0].replacement);
    EXPECT_TRUE(text::is_all_upper(up));
    EXPECT_TRUE(text::is_capitalized(text::decode_utf8(out.applied[1].replacement)));
    EXPECT_FALSE(text::is_all_upper(text::decode_utf8(out.applied[1].replacement)));
}

TEST(Surrogates, NameMappingIsInjectivePerPatient) {
    const auto& lex = base_policy().lexicons.last_names;
    std::string t;
    std::vector<PhiSpan> spans;
    for (std::size_t i = 0; i < 60 && i < lex.size(); ++i) {
        if (lex.display()[i].find(' ') != std::string::npos) continue;
        const std::size_t start = text::codepoint_length(t) + 3;
        t += "Dr " + lex.display()[i] + ". ";
        spans.push_back({start, start + text::codepoint_length(lex.display()[i]), PhiCategory::PersonName,
                         lex.display()[i]});
    }
    const auto out = rewrite(annotated("d", "p", t, spans), base_policy());
    std::set<std::string> originals, replacements;
    for (const auto& a : out.applied) {
        originals.insert(text::normalize_key(a.original.surface));
        replacements.insert(text::normalize_key(a.replacement));
    }
    EXPECT_EQ(replacements.size(), originals.size());
    for (const auto& r : replacements) EXPECT_EQ(originals.count(r), 0u) << r;
}

TEST(Surrogates, LocationShapes) {
    const std::string t = "Domicile: 12 rue de la Loi, 1348 Louvain-la-Neuve. Né à Namur.";
    const auto out = rewrite(annotated("d", "p", t,
                                       {span_of(t, "12 rue de la Loi", PhiCategory::Location),
                                        span_of(t, "1348 Louvain-la-Neuve", PhiCategory::Location),
                                        span_of(t, "Namur", PhiCategory::Location)}),
                             base_policy());
    EXPECT_TRUE(std::regex_match(out.applied[0].replacement, std::regex("[1-9][0-9] rue .+")))
        << out.applied[0].replacement;
    EXPECT_TRUE(std::regex_match(out.applied[1].replacement, std::regex("[1-9][0-9]{3} .+")))
        << out.applied[1].replacement;
    EXPECT_TRUE(base_policy().lexicons.cities.contains_text(out.applied[1].replacement.substr(5)));
    EXPECT_TRUE(base_policy().lexicons.cities.contains_text(out.applied[2].replacement));
    EXPECT_NE(out.applied[2].replacement, "Namur");
}

TEST(Surrogates, InstitutionFromLexicon) {
    const std::string t = "Transfert au CHU de Liège.";
    const auto out = rewrite(annotated("d", "p", t, {span_of(t, "CHU de Liège", PhiCategory::Institution)}),
                             base_policy());
    EXPECT_TRUE(base_policy().lexicons.institutions.contains_text(out.applied[0].replacement));
    EXPECT_NE(text::normalize_key(out.applied[0].replacement), "chu de liège");
}

TEST(Surrogates, IdNumberKeepsShapeAndChanges) {
    const std::string t = "NISS 85.07.30-033.61 et dossier 1234567.";
    const auto out = rewrite(annotated("d", "p", t,
                                       {span_of(t, "85.07.30-033.61", PhiCategory::IdNumber),
                                        span_of(t, "1234567", PhiCategory::IdNumber)}),
                             base_policy());
    EXPECT_TRUE(std::regex_match(out.applied[0].replacement, std::regex("\\d\\d\\.\\d\\d\\.\\d\\d-\\d{3}\\.\\d\\d")));
    EXPECT_NE(out.applied[0].replacement, "85.07.30-033.61");
    EXPECT_TRUE(std::regex_match(out.applied[1].replacement, std::regex("\\d{7}")));
    EXPECT_NE(out.applied[1].replacement, "1234567");
}

TEST(Surrogates, AgePolicies) {
    const std::string t = "Patient âgé de 67 ans";
    const auto kept = rewrite(annotated("d", "p", t, {span_of(t, "67 ans", PhiCategory::Age)}), base_policy());
    EXPECT_EQ(kept.text, t);
    SurrogatePolicy j = base_policy();
    j.age = {AgeMode::Jitter, 2};
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        j.master_seed = seed;
        const auto out = rewrite(annotated("d", "p", t, {span_of(t, "67 ans", PhiCategory::Age)}), j);
        const int v = std::stoi(out.applied[0].replacement);
        EXPECT_NE(v, 67);
        EXPECT_LE(std::abs(v - 67), 2);
        EXPECT_EQ(out.applied[0].replacement.substr(2), " ans");
    }
}

// --- invariants ------------------------------------------------------------------

namespace {

std::vector<AnnotatedDocument> small_corpus() {
    const auto& cfg = fixtures::default_detector_config();
    std::vector<AnnotatedDocument> docs;
    const std::vector<std::string> templates{
        "Monsieur {L}, {A} ans, vu le {D} au CHU de Liège. Tél 0475/12.34.56.",
        "Dr {L} revoit le patient à Namur le {D}. Dossier 1234567.",
        "Contrôle chez Mme {L} le 3 mars 2015, 12 rue de la Loi, 1348 Louvain-la-Neuve. jean@exemple.be",
    };
    const std::vector<std::string> names{"Dupont", "Lambert", "Peeters", "Janssens", "Maes", "Lemaire"};
    for (int i = 0; i < 30; ++i) {
        std::string t = templates[static_cast<std::size_t>(i) % templates.size()];
        auto sub = [&](const std::string& key, const std::string& val) {
            if (const auto at = t.find(key); at != std::string::npos) t.replace(at, key.size(), val);
        };
        sub("{L}", names[static_cast<std::size_t>(i) % names.size()]);
        sub("{A}", std::to_string(30 + i));
        sub("{D}", std::to_string(1 + i % 28) + "/0" + std::to_string(1 + i % 9) + "/2014");
        RawDocument d{"doc" + std::to_string(100 + i), "pat" + std::to_string(i % 7), {2014, 5, 1 + i % 28}, t, {},
                      std::nullopt};
        docs.push_back(detect(d, cfg));
    }
    return docs;
}

}  // namespace

TEST(SurrogateProperties, OffsetsAndSurfacesAreExact) {
    const auto docs = small_corpus();
    SurrogateMap m;
    const auto out = apply_surrogates_corpus(docs, base_policy(), m);
    std::map<std::string, const AnnotatedDocument*> by_id;
    for (const auto& d : docs) by_id[d.doc.doc_id] = &d;
    for (const auto& o : out) {
        const auto& src = by_id.at(o.doc_id)->doc.text;
        for (const auto& a : o.applied) {
            EXPECT_EQ(text::slice_codepoints(src, a.original.start, a.original.end), a.original.surface);
            EXPECT_EQ(text::slice_codepoints(o.text, a.out_start, a.out_end), a.replacement);
            if (a.original.category != PhiCategory::Age) EXPECT_NE(a.replacement, a.original.surface);
        }
    }
}

TEST(SurrogateProperties, OutputIndependentOfThreadsAndSortedByDocId) {
    const auto docs = small_corpus();
    std::string dumps[2];
    const unsigned threads[2] = {1, 4};
    for (int k = 0; k < 2; ++k) {
        SurrogateMap m;
        const auto out = apply_surrogates_corpus(docs, base_policy(), m, threads[k]);
        for (std::size_t i = 1; i < out.size(); ++i) ASSERT_LT(out[i - 1].doc_id, out[i].doc_id);
        for (const auto& o : out) dumps[k] += io::to_json(o).dump() + "\n";
        dumps[k] += to_json(m).dump();
    }
    EXPECT_EQ(dumps[0], dumps[1]);
}

TEST(SurrogateProperties, InputOrderDoesNotMatter) {
    auto docs = small_corpus();
    SurrogateMap m1, m2;
    const auto a = apply_surrogates_corpus(docs, base_policy(), m1);
    std::reverse(docs.begin(), docs.end());
    const auto b = apply_surrogates_corpus(docs, base_policy(), m2);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].text, b[i].text);
}

TEST(SurrogateProperties, AuditDoesNotLeakOriginalSurface) {
    const std::string t = "Monsieur Dupont consulte.";
    const auto out = rewrite(annotated("d", "p", t, {span_of(t, "Dupont", PhiCategory::PersonName)}), base_policy());
    const std::string line = io::to_json(out).dump();
    EXPECT_EQ(line.find("Dupont"), std::string::npos);
    EXPECT_NE(line.find("\"replacement\""), std::string::npos);
}

TEST(SurrogateErrors, SpanOutsideTextOrOverlapping) {
    EXPECT_THROW(rewrite(annotated("d", "p", "abc", {{1, 9, PhiCategory::Date, {}}}), base_policy()), InputError);
    EXPECT_THROW(rewrite(annotated("d", "p", "abcdef", {{0, 3, PhiCategory::Age, {}}, {2, 4, PhiCategory::Age, {}}}),
                         base_policy()),
                 InputError);
}

TEST(SurrogateErrors, PolicyValidation) {
    SurrogatePolicy p = base_policy();
    p.shift_low = 5;
    p.shift_high = 1;
    EXPECT_THROW(p.validate(), InputError);
    SurrogatePolicy q = base_policy();
    q.removal_categories.clear();
    const std::string t = "Tel 0475/12.34.56";
    EXPECT_THROW(rewrite(annotated("d", "p", t, {span_of(t, "0475/12.34.56", PhiCategory::PhoneNumber)}), q), InputError);
}

TEST(SurrogateMapJson, RoundTripContinuesIdentically) {
    auto docs = small_corpus();
    const std::vector<AnnotatedDocument> first(docs.begin(), docs.begin() + 15), second(docs.begin() + 15, docs.end());
    SurrogateMap whole, part;
    const auto all = apply_surrogates_corpus(docs, base_policy(), whole);
    (void)apply_surrogates_corpus(first, base_policy(), part);
    SurrogateMap reloaded = surrogate_map_from_json(io::json::parse(to_json(part).dump()));
    EXPECT_EQ(to_json(reloaded).dump(), to_json(part).dump());
    const auto rest = apply_surrogates_corpus(second, base_policy(), reloaded);
    // Continuing from a persisted map gives the same date offsets and pseudo ids.
    for (const auto& r : rest) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const DeidDocument& d) { return d.doc_id == r.doc_id; });
        ASSERT_NE(it, all.end());
        EXPECT_EQ(it->pseudo_patient_id, r.pseudo_patient_id);
        EXPECT_EQ(it->date, r.date);
    }
}

// --- pseudo ids ------------------------------------------------------------------

TEST(PseudoIds, BijectiveFreshAndReproducible) {
    std::vector<std::string> patients, studies;
    for (int i = 0; i < 500; ++i) patients.push_back("P" + std::to_string(i));
    for (int i = 0; i < 1500; ++i) studies.push_back("S" + std::to_string(i));
    RandomStream s1(42), s2(42);
    const auto a = assign_pseudo_ids(patients, studies, s1);
    const auto b = assign_pseudo_ids(patients, studies, s2);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    std::set<std::string> values;
    for (const auto& [k, v] : a.patients) {
        EXPECT_NE(k, v);
        EXPECT_TRUE(std::regex_match(v, std::regex("[0-9a-f]{32}")));
        values.insert(v);
    }
    for (const auto& [k, v] : a.studies) values.insert(v);
    EXPECT_EQ(values.size(), patients.size() + studies.size());
}

TEST(PseudoIds, SinglePatient) {
    RandomStream s(1);
    const auto m = assign_pseudo_ids({"A"}, {}, s);
    ASSERT_EQ(m.patients.size(), 1u);
    EXPECT_NE(m.patients.at("A"), "A");
}

TEST(PseudoIds, DuplicateInputRejected) {
    RandomStream s(1);
    EXPECT_THROW(assign_pseudo_ids({"A", "A"}, {}, s), InputError);
}
