/** SYLF frame-embedding files, the binary interface to the analysis toolkit.
 *
 * Layout (little-endian): "SYLF" | version u32=1 | dim u32 | n_frames u32 |
 * frame_rate f32 | n_frames*dim f32 row-major.
 */

export const SYLF_MAGIC = 'SYLF'
export const SYLF_VERSION = 1

export interface FrameMatrix {
	dim: number
	nFrames: number
	frameRateHz: number
	/** row-major, length nFrames * dim */
	data: Float32Array
}

export class SylfFormatError extends Error {}

export function encodeSylf(frames: FrameMatrix): Buffer {
	const { dim, nFrames, frameRateHz, data } = frames
	if (data.length !== nFrames * dim) {
		throw new SylfFormatError(`data length ${data.length} != ${nFrames}x${dim}`)
	}
	if (!(dim >= 1) || !(frameRateHz > 0)) {
		throw new SylfFormatError('dim must be >= 1 and frame rate positive')
	}
	for (const value of data) {
		if (!Number.isFinite(value)) {
			throw new SylfFormatError('frame values must be finite')
		}
	}
	const out = Buffer.alloc(20 + 4 * data.length)
	out.write(SYLF_MAGIC, 0, 'ascii')
	out.writeUInt32LE(SYLF_VERSION, 4)
	out.writeUInt32LE(dim, 8)
	out.writeUInt32LE(nFrames, 12)
	out.writeFloatLE(frameRateHz, 16)
	for (let i = 0; i < data.length; i++) {
		out.writeFloatLE(data[i], 20 + 4 * i)
	}
	return out
}

export function decodeSylf(buffer: Buffer): FrameMatrix {
	if (buffer.length < 20 || buffer.toString('ascii', 0, 4) !== SYLF_MAGIC) {
		throw new SylfFormatError('bad SYLF magic')
	}
	const version = buffer.readUInt32LE(4)
	if (version !== SYLF_VERSION) {
		throw new SylfFormatError(`unsupported SYLF version ${version}`)
	}
	const dim = buffer.readUInt32LE(8)
	const nFrames = buffer.readUInt32LE(12)
	const frameRateHz = buffer.readFloatLE(16)
	const need = 20 + 4 * dim * nFrames
	if (buffer.length !== need) {
		throw new SylfFormatError(`expected ${need} bytes, got ${buffer.length}`)
	}
	const data = new Float32Array(dim * nFrames)
	for (let i = 0; i < data.length; i++) {
		data[i] = buffer.readFloatLE(20 + 4 * i)
	}
	return { dim, nFrames, frameRateHz, data }
}
