/** Tiny linear feature-extractor checkpoints stored as JSON.
 *
 * A checkpoint frames audio at a fixed rate, bins each analysis window into
 * `inputDim` averaged features, then applies a chain of tanh(W x + b)
 * layers. `layerIndex` 0 exports the binned input features; index k exports
 * the output of the k-th layer.
 */

import { readFileSync } from 'node:fs'

export interface CheckpointLayer {
	rows: number
	cols: number
	/** row-major weight matrix, length rows * cols */
	weights: number[]
	bias: number[]
}

export interface Checkpoint {
	modelId: string
	sampleRateHz: number
	frameRateHz: number
	windowSamples: number
	inputDim: number
	layers: CheckpointLayer[]
}

export class CheckpointError extends Error {}

function requirePositiveInt(value: unknown, name: string): number {
	if (typeof value !== 'number' || !Number.isInteger(value) || value <= 0) {
		throw new CheckpointError(`${name} must be a positive integer`)
	}
	return value
}

export function parseCheckpoint(json: string): Checkpoint {
	let raw: any
	try {
		raw = JSON.parse(json)
	} catch (error) {
		throw new CheckpointError(`checkpoint is not valid JSON: ${error}`)
	}
	const checkpoint: Checkpoint = {
		modelId: String(raw.modelId ?? 'unnamed'),
		sampleRateHz: requirePositiveInt(raw.sampleRateHz, 'sampleRateHz'),
		frameRateHz: requirePositiveInt(raw.frameRateHz, 'frameRateHz'),
		windowSamples: requirePositiveInt(raw.windowSamples, 'windowSamples'),
		inputDim: requirePositiveInt(raw.inputDim, 'inputDim'),
		layers: [],
	}
	if (checkpoint.sampleRateHz % checkpoint.frameRateHz !== 0) {
		throw new CheckpointError('sampleRateHz must be a multiple of frameRateHz')
	}
	if (!Array.isArray(raw.layers)) {
		throw new CheckpointError('layers must be an array')
	}
	let previousDim = checkpoint.inputDim
	for (const [i, layer] of raw.layers.entries()) {
		const rows = requirePositiveInt(layer.rows, `layers[${i}].rows`)
		const cols = requirePositiveInt(layer.cols, `layers[${i}].cols`)
		if (cols !== previousDim) {
			throw new CheckpointError(
				`layers[${i}] expects ${cols} inputs but receives ${previousDim}`)
		}
		if (!Array.isArray(layer.weights) || layer.weights.length !== rows * cols) {
			throw new CheckpointError(`layers[${i}].weights must hold ${rows * cols} values`)
		}
		if (!Array.isArray(layer.bias) || layer.bias.length !== rows) {
			throw new CheckpointError(`layers[${i}].bias must hold ${rows} values`)
		}
		for (const value of [...layer.weights, ...layer.bias]) {
			if (typeof value !== 'number' || !Number.isFinite(value)) {
				throw new CheckpointError(`layers[${i}] contains non-finite weights`)
			}
		}
		checkpoint.layers.push({ rows, cols, weights: layer.weights, bias: layer.bias })
		previousDim = rows
	}
	return checkpoint
}

export function loadCheckpoint(path: string): Checkpoint {
	return parseCheckpoint(readFileSync(path, 'utf-8'))
}

export function layerOutputDim(checkpoint: Checkpoint, layerIndex: number): number {
	if (!Number.isInteger(layerIndex) || layerIndex < 0 || layerIndex > checkpoint.layers.length) {
		throw new CheckpointError(
			`layer index ${layerIndex} out of range [0, ${checkpoint.layers.length}]`)
	}
	return layerIndex === 0 ? checkpoint.inputDim : checkpoint.layers[layerIndex - 1].rows
}
