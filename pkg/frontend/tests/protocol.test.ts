import { describe, expect, it } from "vitest";

import { formatValue, outputKey, tubeKey } from "../src/protocol.js";

describe("wire keys", () => {
  it("builds tube keys the way the server does", () => {
    expect(
      tubeKey({ from_node: "c1", from_port: "out", to_node: "n2", to_port: "in" }),
    ).toBe("c1.out->n2.in");
  });

  it("builds output keys", () => {
    expect(outputKey("add1", "out")).toBe("add1.out");
  });
});

describe("value formatting", () => {
  it("renders booleans as words", () => {
    expect(formatValue({ type: "boolean", value: true })).toBe("true");
    expect(formatValue({ type: "boolean", value: false })).toBe("false");
  });

  it("renders integral numbers without a fraction", () => {
    expect(formatValue({ type: "number", value: 4 })).toBe("4");
    expect(formatValue({ type: "number", value: -17 })).toBe("-17");
    expect(formatValue({ type: "number", value: 0 })).toBe("0");
  });

  it("trims trailing zeros from fractions", () => {
    expect(formatValue({ type: "number", value: 2.5 })).toBe("2.5");
    expect(formatValue({ type: "number", value: 1.125 })).toBe("1.125");
    expect(formatValue({ type: "number", value: 0.1 })).toBe("0.1");
  });

  it("renders text and refs verbatim", () => {
    expect(formatValue({ type: "text", value: "forward" })).toBe("forward");
    expect(formatValue({ type: "instance_ref", value: "inst:ctor1" })).toBe("inst:ctor1");
    expect(formatValue({ type: "color", value: "red" })).toBe("red");
  });

  it("renders a pulse as the word pulse", () => {
    expect(formatValue({ type: "pulse", value: null })).toBe("pulse");
  });
});
