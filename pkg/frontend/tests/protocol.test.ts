import { describe, expect, it } from "vitest";
import {
  EmbeddingDoc,
  comboKey,
  decodeZ,
  makeFrame,
  parseServerFrame,
} from "../src/protocol.js";

function embeddingWith(z: EmbeddingDoc["z"]): EmbeddingDoc {
  return {
    z,
    method: "neighbor",
    combo: { first: "time", second: "variable" },
    params: {},
    seed: 0,
    trustworthiness: null,
    trustworthiness_k: null,
    warning: null,
  };
}

describe("frames", () => {
  it("client frames serialize with kind, request_id and payload", () => {
    const text = makeFrame("select_cluster", "q7", { point_ids: [1, 2] });
    expect(JSON.parse(text)).toEqual({
      kind: "select_cluster",
      request_id: "q7",
      payload: { point_ids: [1, 2] },
    });
  });

  it("server frames parse and bad ones throw", () => {
    const ok = parseServerFrame(
      '{"kind":"progress","request_id":"q1","payload":{"fraction":0.5}}',
    );
    expect(ok.kind).toBe("progress");
    expect(() => parseServerFrame('{"kind":"nope","request_id":"x"}')).toThrow();
    expect(() => parseServerFrame('{"kind":"result"}')).toThrow();
    expect(() => parseServerFrame("[1,2]")).toThrow();
  });

  it("combo keys concatenate first and second", () => {
    expect(comboKey({ first: "variable", second: "time" })).toBe("variable-time");
  });
});

describe("embedding payloads", () => {
  it("inline coordinate lists decode in row order", () => {
    const z = decodeZ(embeddingWith([[1, 2], [3, 4]]));
    expect([...z]).toEqual([1, 2, 3, 4]);
  });

  it("base64 payloads decode little-endian float64 pairs", () => {
    const values = new Float64Array([0.5, -1.25, 3e5, Math.PI]);
    const bytes = new Uint8Array(values.buffer);
    let raw = "";
    for (const b of bytes) raw += String.fromCharCode(b);
    const z = decodeZ(
      embeddingWith({
        encoding: "base64",
        dtype: "<f8",
        shape: [2, 2],
        data: btoa(raw),
      }),
    );
    expect([...z]).toEqual([0.5, -1.25, 3e5, Math.PI]);
  });
});
