/** Approval queue with optimistic decisions.
 *
 * A decision removes the item immediately; a server rejection rolls the
 * item back into the queue with the error shown inline. Decisions are
 * serialized per item (a second click while one is in flight is ignored).
 */

import { ApiClient, ApiError } from "./api.js";
import type { QueueItem } from "./types.js";

export interface QueueState {
  items: QueueItem[];
  inFlight: Set<string>;
  errors: Map<string, string>;
  lastRefreshed: string | null;
}

export class ApprovalQueue {
  private state: QueueState = {
    items: [],
    inFlight: new Set(),
    errors: new Map(),
    lastRefreshed: null,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: QueueState) => void,
  ) {}

  snapshot(): QueueState {
    return {
      items: [...this.state.items],
      inFlight: new Set(this.state.inFlight),
      errors: new Map(this.state.errors),
      lastRefreshed: this.state.lastRefreshed,
    };
  }

  private emit(): void {
    this.onChange(this.snapshot());
  }

  async refresh(): Promise<void> {
    const fetched = await this.api.fetchQueue("REQUESTED");
    // keep rows that are mid-decision out of the refreshed list
    this.state.items = fetched.filter((item) => !this.state.inFlight.has(item.id));
    this.state.lastRefreshed = new Date().toISOString();
    this.emit();
  }

  async decide(associationId: string, decision: "approve" | "reject"): Promise<boolean> {
    if (this.state.inFlight.has(associationId)) {
      return false;
    }
    const index = this.state.items.findIndex((item) => item.id === associationId);
    if (index < 0) {
      return false;
    }
    const snapshot = this.state.items[index]!;
    this.state.items.splice(index, 1); // optimistic removal
    this.state.inFlight.add(associationId);
    this.state.errors.delete(associationId);
    this.emit();
    try {
      await this.api.decideAssociation(associationId, decision);
      return true;
    } catch (error) {
      // rollback: the item returns at its old position with the error inline
      this.state.items.splice(Math.min(index, this.state.items.length), 0, snapshot);
      const message =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      this.state.errors.set(associationId, message);
      return false;
    } finally {
      this.state.inFlight.delete(associationId);
      this.emit();
    }
  }
}
