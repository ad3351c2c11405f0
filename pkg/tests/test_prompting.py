import random

from qaforge.config import default_general_purpose_config, parse_config
from qaforge.corpus import Document
from qaforge.prompting import default_template, render_prompt
from qaforge.sampling import CategoryDraw, draw_categories

DOC = Document(id="doc-1", text="The amount of rainfall in Oslo doubled in 2019.")


def default_draw(seed=4):
    return draw_categories(default_general_purpose_config(), random.Random(seed))


class TestRenderPrompt:
    def test_k_and_bullet_counts(self):
        prompt = render_prompt(default_draw(), DOC, k=3)
        assert "generate 3 candidate questions" in prompt.text
        assert "The 3 questions must be about facts" in prompt.text
        assert prompt.text.count("- They must be ") == 1
        assert prompt.text.count("- It must be ") == 4

    def test_vanilla_prompt_has_no_characteristics_sections(self):
        prompt = render_prompt(CategoryDraw(), DOC, k=3)
        assert "characteristics" not in prompt.text
        assert DOC.text in prompt.text
        assert "You are a user simulator" in prompt.text

    def test_short_search_query_description_inserted_verbatim(self):
        cfg = default_general_purpose_config()
        phrasing = next(c for c in cfg.question_categorizations if c.name == "Phrasing")
        short = next(c for c in phrasing.categories if c.name == "short-search-query")
        draw = CategoryDraw(question_picks=(("Phrasing", short),))
        prompt = render_prompt(draw, DOC, k=3)
        assert "phrased as a typed web query for search engines" in prompt.text

    def test_document_inserted_exactly_once(self):
        prompt = render_prompt(default_draw(), DOC, k=3)
        assert prompt.text.count(DOC.text) == 1

    def test_descriptions_inserted_exactly_once(self):
        draw = default_draw()
        prompt = render_prompt(draw, DOC, k=3)
        for _, category in draw.picks:
            assert prompt.text.count(category.description) == 1

    def test_category_names_are_not_inserted(self):
        # names like "short-search-query" are distinctive enough that any
        # occurrence would mean the renderer leaked them into the prompt
        cfg = default_general_purpose_config()
        for seed in range(8):
            draw = draw_categories(cfg, random.Random(seed))
            text = render_prompt(draw, DOC, k=3).text
            for name in ("short-search-query", "long-search-query",
                         "concise-and-natural", "verbose-and-natural",
                         "with-premise", "open-ended", "similar-to-document",
                         "distant-from-document"):
                assert name not in text

    def test_rendering_is_byte_stable(self):
        draw = default_draw()
        assert render_prompt(draw, DOC, 5).text == render_prompt(draw, DOC, 5).text

    def test_output_format_instruction_is_verbatim(self):
        prompt = render_prompt(CategoryDraw(), DOC, k=3)
        assert "Write each pair in a new line" in prompt.text
        assert '\'{"question": <question>, "answer": <answer>}.\'' in prompt.text

    def test_metadata_fields(self):
        prompt = render_prompt(default_draw(), DOC, k=7)
        assert prompt.num_questions == 7
        assert prompt.document_id == "doc-1"

    def test_custom_template_override(self):
        template = "Ask [num_questions] things about:\n[document]\n\nRules:\n[question_characteristics]\n"
        cfg = parse_config(
            '{"question_categorizations": [{"name": "Q", "categories":'
            ' [{"name": "c", "probability": 1.0, "description": "terse"}]}]}'
        )
        draw = draw_categories(cfg, random.Random(0))
        prompt = render_prompt(draw, DOC, k=2, template=template)
        assert "Ask 2 things" in prompt.text
        assert "- It must be terse" in prompt.text

    def test_custom_template_paragraph_dropped_when_empty(self):
        template = "Head [num_questions]\n\nUsers:\n[user_characteristics]\n\nDoc: [document]\n"
        prompt = render_prompt(CategoryDraw(), DOC, k=1, template=template)
        assert "Users:" not in prompt.text
        assert "Doc: " + DOC.text in prompt.text

    def test_document_containing_placeholder_is_inserted_as_is(self):
        doc = Document(id="d", text="literal [num_questions] stays")
        prompt = render_prompt(CategoryDraw(), doc, k=3)
        assert "literal [num_questions] stays" not in default_template()
        assert "literal [num_questions] stays" in prompt.text
