import { describe, expect, it } from "vitest";
import { WorkbenchClient } from "../src/client.js";
import { StubSocket } from "./stub.js";

describe("request correlation", () => {
  it("routes results to the handler of the answering kind", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const seen: unknown[] = [];
    client.onResult("load_dataset", (body) => seen.push(body));
    const id = client.send("load_dataset", { path: "a.json" });
    sock.result(id, "load_dataset", { name: "a" });
    expect(seen).toEqual([{ name: "a" }]);
  });

  it("request ids are unique and frames carry them", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const a = client.send("request_results", { point_mode: "instance" });
    const b = client.send("request_histograms", { feature_index: 0 });
    expect(a).not.toBe(b);
    expect(sock.sent.map((f) => f.request_id)).toEqual([a, b]);
  });

  it("progress frames reach the progress handler with the kind", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const fractions: number[] = [];
    client.onProgress((f, kind) => {
      expect(kind).toBe("request_results");
      fractions.push(f);
    });
    const id = client.send("request_results", { point_mode: "time" });
    sock.progress(id, 0.25);
    sock.progress(id, 1.0);
    expect(fractions).toEqual([0.25, 1.0]);
  });
});

describe("stale frames never reach a view", () => {
  it("drops a result whose request was superseded by a newer one", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const bodies: any[] = [];
    client.onResult("request_results", (body) => bodies.push(body));
    const oldId = client.send("request_results", { point_mode: "time" });
    const newId = client.send("request_results", { point_mode: "instance" });
    sock.result(oldId, "request_results", { point_mode: "time", results: [] });
    sock.result(newId, "request_results", { point_mode: "instance", results: [] });
    expect(bodies.map((b) => b.point_mode)).toEqual(["instance"]);
    expect(client.staleCount).toBe(1);
  });

  it("drops progress of superseded requests silently", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const fractions: number[] = [];
    client.onProgress((f) => fractions.push(f));
    const oldId = client.send("request_results", {});
    client.send("request_results", {});
    sock.progress(oldId, 0.5);
    expect(fractions).toEqual([]);
    expect(client.staleCount).toBe(0);
  });

  it("treats the server's superseded error as a discard, not an error", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const errors: string[] = [];
    client.onError((f) => errors.push(f.payload.message));
    const oldId = client.send("request_results", {});
    client.send("request_results", {});
    sock.error(oldId, "superseded by a newer request", "superseded");
    expect(errors).toEqual([]);
    expect(client.staleCount).toBe(1);
  });

  it("real errors for the live request are surfaced", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const errors: string[] = [];
    client.onError((f) => errors.push(f.payload.message));
    const id = client.send("select_cluster", { point_ids: [0] });
    sock.error(id, "a cluster needs a minimum of 2 points");
    expect(errors).toEqual(["a cluster needs a minimum of 2 points"]);
  });

  it("ignores frames for unknown request ids", () => {
    const sock = new StubSocket();
    const client = new WorkbenchClient(sock);
    const bodies: unknown[] = [];
    client.onResult("load_dataset", (b) => bodies.push(b));
    sock.result("never-sent", "load_dataset", { name: "ghost" });
    expect(bodies).toEqual([]);
    expect(client.staleCount).toBe(1);
  });
});
